"""Python access to the Artism simulator core.

The heavy lifting happens in the compiled ``_artism`` module; this package only
decodes the JSON it hands back.
"""

import json
import os
import tempfile
from pathlib import Path

# Wheels carry the sample corpus and KB seed next to the package.
_bundled = Path(__file__).with_name("data")
if _bundled.is_dir():
    os.environ.setdefault("ARTISM_DATA_DIR", str(_bundled))

from ._artism import ArtismError, cli_main, data_dir, mock_complete, recombine
from ._artism import Simulation as _CoreSimulation

__all__ = ["ArtismError", "Simulation", "cli_main", "data_dir", "mock_complete", "recombine", "run"]


class Simulation:
    """A live world with the /api/v1 router attached."""

    def __init__(self, config=None, seed=None, overrides=None, debug=False):
        settings = {k: str(v).lower() if isinstance(v, bool) else str(v) for k, v in (overrides or {}).items()}
        self._core = _CoreSimulation(config=None if config is None else str(config), seed=seed,
                                     overrides=settings, debug=debug)

    def step(self, n=1):
        self._core.step(n)
        return self

    @property
    def tick(self):
        return self._core.tick

    @property
    def log_hash(self):
        return self._core.log_hash

    def events(self):
        return [json.loads(line) for line in self._core.event_lines()]

    def get(self, path, **query):
        return self._request("GET", path, query, "")

    def post(self, path, body=None):
        return self._request("POST", path, {}, json.dumps(body or {}))

    def _request(self, method, path, query, body):
        status, text = self._core.request(method, "/api/v1" + path, {k: str(v) for k, v in query.items()}, body)
        return status, json.loads(text)

    def persist(self, directory):
        self._core.persist(str(directory))


def run(seed=42, ticks=200, out=None, config=None):
    """Headless run through the CLI path; returns the log hash. Without `out` the files are discarded."""
    if out is None:
        with tempfile.TemporaryDirectory() as scratch:
            return run(seed, ticks, scratch, config)
    args = ["run", "--ticks", str(ticks), "--out", str(out)]
    if seed is not None:
        args += ["--seed", str(seed)]
    if config is not None:
        args += ["--config", str(config)]
    code, stdout, stderr = cli_main(args)
    if code != 0:
        raise ArtismError(stderr.strip())
    return stdout.split("log_hash: ", 1)[1].strip()
