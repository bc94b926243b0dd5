import csv
import json

import pytest

from hypergconv import cli


def write_cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def read_rows(out_dir):
    with open(out_dir / "summary.csv") as fh:
        return list(csv.DictReader(fh))


def strip_runtime(rows):
    return [{k: v for k, v in r.items() if k != "runtime_s"} for r in rows]


@pytest.mark.parametrize("kind,cfg", [
    ("lb-nonsmooth", {"T": 4, "r": 1.0, "players": ["polyak", "random"]}),
    ("lb-smooth", {"T": 2, "r": 1.0, "sandwich_samples": 4, "chord_samples": 4}),
    ("polyak-worst", {"eps": 0.17, "r": 5.0}),
    ("cut-game", {"d": 3, "r": 4.0, "eps": 0.12, "games": 1, "max_rounds": 5}),
    ("interp", {"theta_grid": [0.2, 1.2, 3], "triples": 10}),
    ("zoo-validate", {"d": 3, "samples": 40}),
])
def test_kinds_pass(tmp_path, kind, cfg):
    out = tmp_path / "out"
    code = cli.main([kind, "--config", write_cfg(tmp_path, cfg),
                     "--seed", "1", "--out", str(out)])
    assert code == 0
    rows = read_rows(out)
    assert rows and all(r["passed"] == "True" for r in rows)
    assert (out / "transcript.json").exists()


def test_config_parse_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.main(["interp", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_file(tmp_path):
    assert cli.main(["interp", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")]) == 2


def test_failing_check_exits_one(tmp_path, monkeypatch, capsys):
    def bad_runner(params, seed):
        return [cli._row("zoo-validate", "forced", 1.0, 0.0, False, 0.0)], {}

    monkeypatch.setitem(cli.RUNNERS, "zoo-validate", bad_runner)
    code = cli.main(["zoo-validate", "--config", write_cfg(tmp_path, {}),
                     "--out", str(tmp_path / "o")])
    assert code == 1
    assert "FAIL" in capsys.readouterr().err


def test_determinism_excluding_runtime(tmp_path):
    cfg = write_cfg(tmp_path, {"T": 4, "r": 1.0, "players": ["polyak"]})
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["lb-nonsmooth", "--config", cfg, "--seed", "7",
                     "--out", str(out1)]) == 0
    assert cli.main(["lb-nonsmooth", "--config", cfg, "--seed", "7",
                     "--out", str(out2)]) == 0
    assert strip_runtime(read_rows(out1)) == strip_runtime(read_rows(out2))


def test_sweep_grid_of_one_matches_run(tmp_path):
    base = {"T": 4, "r": 1.0, "players": ["polyak"]}
    out_run = tmp_path / "run"
    cli.main(["lb-nonsmooth", "--config", write_cfg(tmp_path, base, "a.json"),
              "--seed", "5", "--out", str(out_run)])
    sweep = {"kind": "lb-nonsmooth", "base": {"r": 1.0, "players": ["polyak"]},
             "grid": {"T": [4]}}
    out_sweep = tmp_path / "sweep"
    cli.main(["sweep", "--config", write_cfg(tmp_path, sweep, "b.json"),
              "--seed", "5", "--out", str(out_sweep)])
    r1 = strip_runtime(read_rows(out_run))
    r2 = strip_runtime(read_rows(out_sweep))
    assert len(r2) == 1
    assert r1[0]["measured"] == r2[0]["measured"]


def test_sweep_empty_grid_empty_body(tmp_path):
    sweep = {"kind": "lb-nonsmooth", "base": {"T": 4, "r": 1.0}, "grid": {}}
    out = tmp_path / "s"
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, sweep),
                     "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows == []


def test_sweep_cartesian_count(tmp_path):
    sweep = {"kind": "lb-nonsmooth", "base": {"players": ["polyak"]},
             "grid": {"T": [2, 4, 8], "r": [1.0, 2.0, 3.0]}}
    out = tmp_path / "s9"
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, sweep),
                     "--seed", "2", "--out", str(out)]) == 0
    assert len(read_rows(out)) == 9


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERGCONV_THREADS", "2")
    sweep = {"kind": "interp", "base": {"theta_grid": [0.3, 1.0, 2], "triples": 5},
             "grid": {"triples": [5, 6]}}
    out = tmp_path / "st"
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, sweep),
                     "--seed", "3", "--out", str(out)]) == 0
