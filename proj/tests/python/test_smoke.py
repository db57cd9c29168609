import itertools
import json
import re
import signal
import subprocess
import urllib.request

import jsonschema
import pytest

import artism


def test_exemplar_name():
    assert artism.mock_complete("ism_naming", {"units": "negative volume | object"}, 3) == "Negative-Volume Objectism"


def test_recombine_matches_itertools():
    labels = ["f", "a", "d", "b", "e"]
    for r in range(2, 6):
        assert artism.recombine(labels, r) == [list(c) for c in itertools.combinations(sorted(labels), r)]
    sampled = artism.recombine(labels, 2, seed=7, m=4)
    assert len(sampled) == 4
    assert len({tuple(c) for c in sampled}) == 4
    with pytest.raises(artism.ArtismError, match="ArityTooLarge"):
        artism.recombine(["a", "b"], 3)


def test_runs_are_reproducible(tmp_path):
    first = artism.run(seed=42, ticks=20, out=tmp_path / "a")
    second = artism.run(seed=42, ticks=20, out=tmp_path / "b")
    assert first == second
    assert (tmp_path / "a" / "events.jsonl").read_bytes() == (tmp_path / "b" / "events.jsonl").read_bytes()
    assert artism.run(seed=7, ticks=20) != first


def test_simulation_matches_the_cli_run(tmp_path):
    sim = artism.Simulation(seed=42)
    sim.step(20)
    assert sim.tick == 20
    assert sim.log_hash == artism.run(seed=42, ticks=20)
    kinds = {e["kind"] for e in sim.events()}
    assert {"SimulationStarted", "IsmCoined", "FedBack", "TickCompleted"} <= kinds


def test_api_responses_validate(schemas):
    sim = artism.Simulation(seed=42, debug=True)
    sim.step(12)
    defs = {"definitions": schemas["definitions"]}

    def check(key, status, body, expected=200):
        assert status == expected, body
        jsonschema.validate(body, {**defs, "$ref": "#/definitions/envelope"})
        jsonschema.validate(body["data"], {**defs, **schemas["endpoints"][key]})

    check("GET /simulation/status", *sim.get("/simulation/status"))
    status, agents = sim.get("/agents")
    check("GET /agents", status, agents)
    agent = agents["data"][0]["agent_id"]
    check("GET /agents/{id}", *sim.get("/agents/" + agent))
    check("GET /agents/{id}/private", *sim.get(f"/agents/{agent}/private"))
    check("GET /agents/{id}/memories", *sim.get(f"/agents/{agent}/memories", limit=4))
    check("GET /feed", *sim.get("/feed", page=5))
    check("POST /posts", *sim.post("/posts", {"user_name": "ann", "text": "hello"}), expected=201)
    check("POST /agents/{id}/dialogue", *sim.post(f"/agents/{agent}/dialogue", {"text": "why?"}))
    status, isms = sim.get("/isms")
    check("GET /isms", status, isms)
    check("GET /isms/{id}", *sim.get("/isms/" + isms["data"][0]["ism_id"]))
    check("GET /timeline", *sim.get("/timeline", **{"from": 0, "to": 12}))
    check("POST /simulation/step", *sim.post("/simulation/step", {"n": 1}))

    status, err = sim.get("/agents/nobody")
    assert status == 404
    jsonschema.validate(err, {**defs, "$ref": "#/definitions/error"})
    assert err["error"]["code"] == "UnknownAgent"


def test_bad_config_raises():
    with pytest.raises(artism.ArtismError, match="ConfigError"):
        artism.Simulation(overrides={"top_k": 0})


def test_cli_usage_and_ingest(tmp_path):
    code, _, _ = artism.cli_main(["nonsense"])
    assert code == 1
    data = artism.data_dir()
    code, out, _ = artism.cli_main(["ingest", "--corpus", f"{data}/sample_corpus.jsonl", "--kb",
                                    f"{data}/kb_seed.jsonl", "--out", str(tmp_path)])
    assert code == 0
    assert "12 profiles" in out
    assert len((tmp_path / "profiles.jsonl").read_text().splitlines()) == 12


def test_serve_end_to_end(artism_bin, tmp_path, schemas):
    assert artism.run(seed=42, ticks=12, out=tmp_path)
    before = len((tmp_path / "events.jsonl").read_text().splitlines())
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<p>ui</p>")
    proc = subprocess.Popen([artism_bin, "serve", "--state", str(tmp_path), "--port", "0", "--ui", str(ui)],
                            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    try:
        line = proc.stdout.readline()
        match = re.search(r"listening on (http://\S+)", line)
        assert match, line + proc.stderr.read()
        base = match.group(1)

        with urllib.request.urlopen(base + "/api/v1/simulation/status") as r:
            assert r.headers["Access-Control-Allow-Origin"] == "*"
            status = json.load(r)
        assert status["data"]["tick"] == 12
        jsonschema.validate(status["data"], {"definitions": schemas["definitions"],
                                             **schemas["endpoints"]["GET /simulation/status"]})

        req = urllib.request.Request(base + "/api/v1/simulation/step", data=b'{"n": 2}', method="POST",
                                     headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req) as r:
            assert json.load(r)["server_tick"] == 14

        with urllib.request.urlopen(base + "/index.html") as r:
            assert r.read() == b"<p>ui</p>"
    finally:
        proc.send_signal(signal.SIGINT)
        out, _ = proc.communicate(timeout=30)
    assert proc.returncode == 0
    assert "stopped" in out
    after = len((tmp_path / "events.jsonl").read_text().splitlines())
    assert after > before
