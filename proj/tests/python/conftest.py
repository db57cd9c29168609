import json
import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schemas():
    return json.loads((ROOT / "data" / "api_schemas.json").read_text())


@pytest.fixture(scope="session")
def artism_bin():
    path = os.environ.get("ARTISM_BIN", str(ROOT / "build" / "artism"))
    if not Path(path).exists():
        pytest.skip("artism binary not built")
    return path
