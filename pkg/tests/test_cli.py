import json

import pytest

from trc.cli import main
from trc.generators import asia
from trc.io import write_model


@pytest.fixture
def asia_file(tmp_path):
    path = tmp_path / "asia.trc"
    write_model(asia(), path)
    return path


def test_validate(asia_file, tmp_path, capsys):
    assert main(["validate", str(asia_file)]) == 0
    bad = tmp_path / "bad.trc"
    bad.write_text("trc-model 1\nvariable a : 1 2\ncpt a |\n0.5 0.6\n")
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(tmp_path / "missing.trc")]) == 2
    (tmp_path / "junk.trc").write_text("hello\n")
    assert main(["validate", str(tmp_path / "junk.trc")]) == 2


def test_factorize_writes_sidecar(asia_file, tmp_path):
    out = tmp_path / "asia.bfg"
    assert main(["factorize", str(asia_file), "-o", str(out)]) == 0
    assert out.exists() and (tmp_path / "asia.bfg.meta").read_text().startswith("trc-meta 1")


def test_moralize_and_regions(asia_file, tmp_path, capsys):
    assert main(["moralize", str(asia_file), "--dot"]) == 0
    assert "dashed" in capsys.readouterr().out
    assert main(["regions", str(asia_file), "--rgbf", "--list-outer"]) == 0
    assert "primary" in capsys.readouterr().out
    assert main(["regions", str(asia_file), "--report"]) == 0
    assert "deviations: none" in capsys.readouterr().out
    assert main(["regions", str(asia_file), "--dot", "-o", str(tmp_path / "r.dot")]) == 0
    assert (tmp_path / "r.dot").read_text().startswith("digraph")


def test_infer_and_compare(asia_file, tmp_path, capsys):
    ev = tmp_path / "ev.txt"
    ev.write_text("a=2\nd=2\n")
    out = tmp_path / "o.jsonl"
    assert main(["infer", str(asia_file), "--evidence", str(ev), "--jsonl", str(out)]) == 0
    recs = [json.loads(l) for l in out.read_text().splitlines()]
    assert {r["variable"] for r in recs} == set(asia().names)
    assert main(["compare", str(asia_file), "--observe", "a=2", "d=2"]) == 0
    assert "max(KL)" in capsys.readouterr().out
    assert main(["infer", str(asia_file), "--method", "exact"]) == 0


def test_exit_codes(asia_file):
    assert main(["infer", str(asia_file), "--observe", "a=7"]) == 2
    assert main(["infer", str(asia_file), "--max-iterations", "2"]) == 4
    assert main(["infer", str(asia_file), "--max-iterations", "2", "--strict"]) == 4


def test_gen_random(tmp_path, capsys):
    assert main(["gen-random", "3", "2", "0"]) == 0
    assert capsys.readouterr().out.startswith("trc-model 1")
    assert main(["gen-random", "20", "2", "7", "--kappa", "-o", str(tmp_path / "k.trc")]) == 0
    assert main(["gen-random", "2", "2", "0"]) == 2


def test_run_experiment(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert main(["run-experiment", str(empty)]) == 0
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"instances": [{"kind": "kappa", "n": 5, "seeds": [0]}],
                                "epsilons": [1e-3, 1e-5], "bounds": {"max_kl": 1e-2}}))
    out = tmp_path / "s.jsonl"
    assert main(["run-experiment", str(spec), "-o", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert sum(r.get("record") == "summary" for r in rows) == 2
    spec.write_text(json.dumps({"instances": [{"kind": "kappa", "n": 5}], "bounds": {"max_kl": 1e-12}}))
    assert main(["run-experiment", str(spec)]) == 1
    spec.write_text(json.dumps({"bogus": 1}))
    assert main(["run-experiment", str(spec)]) == 2
