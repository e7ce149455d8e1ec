import json

import pytest
from click.testing import CliRunner

from hermtheta.cli import main
from hermtheta.maass import gen_krieg_table
from hermtheta.qfield import make_field
from hermtheta.theta import HermIndex


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return go


def test_vd(run):
    r = run("vd", "--m", 5, "--d", 2)
    out = json.loads(r.output)
    assert r.exit_code == 0
    assert (out["alpha"], out["beta"], out["gamma"], out["delta"]) == (8, 1, 1, 1)
    assert run("vd", "--m", 5, "--d", 3).exit_code == 1


def test_isometry(run):
    out = json.loads(run("isometry", "--m", 5, "--d", 1).output)
    assert out["isometric"] and out["witness"] == [[int(i == j) for j in range(8)] for i in range(8)]
    out = json.loads(run("isometry", "--m", 30, "--d", 5).output)
    assert not out["isometric"] and out["witness"] == "none"
    assert len(out["gram"]) == len(out["gram_scaled"]) == 8


def test_classify_single(run, tmp_path):
    cache = tmp_path / "cache"
    r = run("classify", "--m", 30, "--cache-dir", cache, "--out", tmp_path / "a.json", "--csv", tmp_path / "a.csv")
    assert r.exit_code == 0
    rep = json.loads((tmp_path / "a.json").read_text())
    assert rep["bad"] == [30] and rep["good"] == []
    assert rep["reports"][0]["verdicts"]["1"]["isometric"]
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "m,d,isometric" and len(lines) == 9
    # warm cache gives identical bytes
    run("classify", "--m", 30, "--cache-dir", cache, "--out", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert any(cache.rglob("m30_d5.json"))


def test_classify_jobs_identical(run, tmp_path):
    run("classify", "--max-m", 7, "--no-cache", "--jobs", 1, "--out", tmp_path / "1.json")
    run("classify", "--max-m", 7, "--no-cache", "--jobs", 3, "--out", tmp_path / "3.json")
    assert (tmp_path / "1.json").read_bytes() == (tmp_path / "3.json").read_bytes()
    assert json.loads((tmp_path / "1.json").read_text())["good"] == [1, 2, 3, 5, 6, 7]


def test_classify_rejects(run):
    assert run("classify", "--m", 4).exit_code == 1
    assert run("classify", "--max-m", 500).exit_code == 1
    assert run("classify").exit_code == 1


def test_theta(run, tmp_path):
    out = json.loads(run("theta", "--m", 5, "--degree", 1, "--trace-bound", 2).output)
    assert [e["value"] for e in out["entries"]] == ["1/1", "240/1", "2160/1"]
    out = json.loads(run("theta", "--m", 5, "--trace-bound", 0).output)
    assert len(out["entries"]) == 1
    run("theta", "--m", 30, "--trace-bound", 2, "--out", tmp_path / "a.json")
    run("theta", "--m", 30, "--trace-bound", 2, "--ideal-d", 5, "--out", tmp_path / "b.json")
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    assert a["entries"] != b["entries"]
    assert run("theta", "--m", 30, "--trace-bound", 2, "--ideal-d", 7).exit_code == 1


def test_maass_exit_codes(run, tmp_path):
    tab = gen_krieg_table(make_field(5), 4, lambda D: D + 1, 40, 4)
    p = tmp_path / "k.json"
    p.write_text(json.dumps(tab.to_json()))
    r = run("maass", "--table", p)
    assert r.exit_code == 0, r.output
    assert json.loads(r.output)["krieg_ok"] is True

    data = tab.to_json()
    e = next(e for e in data["entries"] if HermIndex(e["k"], e["l"], *e["tau"]).epsilon() > 1)
    e["value"] = "12345/1"
    p.write_text(json.dumps(data))
    r = run("maass", "--table", p, "--checks", "sugano")
    assert r.exit_code == 2
    assert json.loads(r.output)["witnesses"][0]["index"] == {"k": e["k"], "l": e["l"], "tau": e["tau"]}

    (tmp_path / "bad.json").write_text("{\"m\": 5}")
    assert run("maass", "--table", tmp_path / "bad.json").exit_code == 1


def test_maass_undetermined_without_oracle(run, tmp_path):
    p = tmp_path / "t.json"
    run("theta", "--m", 5, "--trace-bound", 4, "--out", p)
    r = run("maass", "--table", p, "--checks", "sugano", "--no-oracle")
    assert r.exit_code == 3
    assert json.loads(r.output)["unresolved"]["sugano"]
