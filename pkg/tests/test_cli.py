import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from bismut_lab.cli import census_report, check_report, main


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run(runner, *args, env=None):
    return runner.invoke(main, list(args), env=env)


def catalog_doc(name, **params):
    return {"type": "catalog", "name": name, "params": params}


def test_check_so3c(runner, tmp_path):
    r = run(runner, "check", write(tmp_path, "s.json", catalog_doc("so3c")))
    assert r.exit_code == 0, r.output
    out = json.loads(r.output)
    assert out["summary"] == {"balanced": True, "btp": True, "bkl": False, "rankB": 3}
    assert out["input"]["name"] == "so3c"


def test_classify_nilmanifold_bkl(runner, tmp_path):
    r = run(runner, "classify", write(tmp_path, "n.json", catalog_doc("nil3", b=[0, 1])))
    assert json.loads(r.output)["label"] == "BKL"


def test_identities_abelian_exact_zero(runner, tmp_path):
    r = run(runner, "identities", write(tmp_path, "a.json", catalog_doc("abelian")))
    out = json.loads(r.output)
    assert out["max_residual"] == 0 and all(v == 0 for v in out["residuals"].values())


def test_emitted_document_round_trips(runner, tmp_path):
    r = run(runner, "catalog", "emit", "family_C", "--params", '{"u": [0, 1], "v": 1}')
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["type"] == "lie_hermitian"
    a = check_report(doc)
    b = check_report(catalog_doc("family_C", u=[0, 1], v=1))
    assert a["flags"] == b["flags"]


def test_coordinate_document(runner, tmp_path):
    r = run(runner, "catalog", "emit", "wallach")
    path = write(tmp_path, "w.json", r.output)
    out = json.loads(run(runner, "check", path).output)
    assert out["summary"]["rankB"] == 1 and out["summary"]["btp"]
    curv = json.loads(run(runner, "curvature", path).output)
    table = {row["indices"]: row["value"] for row in curv["tables"]["chern_11"]}
    assert table["1 1b 1 1b"] == pytest.approx([2, 0])


def test_output_is_byte_identical(runner, tmp_path):
    path = write(tmp_path, "d.json", catalog_doc("family_D", u=[0, 1], rho=[0, 1], eps=-1))
    for cmd in ("check", "curvature", "identities"):
        outs = {run(runner, cmd, path).output for _ in range(3)}
        assert len(outs) == 1


def test_markdown(runner, tmp_path):
    path = write(tmp_path, "s.json", catalog_doc("so3c"))
    r = run(runner, "curvature", path, "--format", "md")
    assert r.output.startswith("# bismut-lab curvature")
    assert "| 1 2b 2 1b |" in r.output or "## bismut_11" in r.output
    r = run(runner, "check", path, "--format", "md")
    assert "| btp_direct | true |" in r.output


def test_out_file(runner, tmp_path):
    out = tmp_path / "r.json"
    r = run(runner, "check", write(tmp_path, "s.json", catalog_doc("so3c")), "--out", str(out))
    assert r.exit_code == 0 and r.output == ""
    assert json.loads(out.read_text())["rank_B"] == 3


def test_timing_is_opt_in(runner, tmp_path):
    path = write(tmp_path, "s.json", catalog_doc("so3c"))
    assert "timing" not in json.loads(run(runner, "check", path).output)
    assert json.loads(run(runner, "check", path, "--timing").output)["timing"]["seconds"] >= 0


def test_tolerance_sources(runner, tmp_path):
    path = write(tmp_path, "s.json", catalog_doc("so3c"))
    assert json.loads(run(runner, "check", path).output)["tol"] == 1e-9
    assert json.loads(run(runner, "check", path, env={"BISMUT_LAB_TOL": "1e-7"}).output)["tol"] == 1e-7
    assert json.loads(run(runner, "check", path, "--tol", "1e-6").output)["tol"] == 1e-6
    doc = {**catalog_doc("so3c"), "options": {"tol": 1e-8}}
    assert json.loads(run(runner, "check", write(tmp_path, "t.json", doc)).output)["tol"] == 1e-8
    assert run(runner, "check", path, env={"BISMUT_LAB_TOL": "abc"}).exit_code == 3


GRID = '{"b": [-1, 1, [0, 1], [0, 2], [1, 1]]}'


def test_census_equals_independent_checks(runner, tmp_path):
    path = write(tmp_path, "c.json", catalog_doc("nil3"))
    serial = json.loads(run(runner, "census", path, "--grid", GRID).output)
    parallel = json.loads(run(runner, "census", path, "--grid", GRID, "--workers", "3").output)
    assert serial == parallel
    assert [r["index"] for r in serial["results"]] == list(range(5))
    for r in serial["results"]:
        single = json.loads(run(runner, "check", write(tmp_path, "one.json", catalog_doc("nil3", **r["params"]))).output)
        single.pop("input")
        assert r["report"] == single
    labels = [r["report"]["classification"]["label"] for r in serial["results"]]
    assert labels == ["middle type (rank 2)", "generalized-vaisman", "BKL", "BKL", "eigenvalue branch (1)"]


def test_census_grid_file_and_per_point_errors(tmp_path):
    grid = tmp_path / "g.json"
    grid.write_text('{"u": [1], "v": [0, 1], "w": [0, [0, -2]]}')
    rep = census_report(catalog_doc("family_B", eps=1), {"u": [1], "v": [0, 1], "w": [0, [0, -2]]})
    errors = [r for r in rep["results"] if "error" in r]
    assert len(errors) == 2  # only (v, w) = (0, 0) and (1, −2i) satisfy the constraint
    r = CliRunner().invoke(main, ["census", write(tmp_path, "b.json", catalog_doc("family_B")), "--grid", f"@{grid}"])
    assert r.exit_code == 0


@pytest.mark.parametrize("content,args,code", [
    ("{bad", ("check",), 3),
    ({"type": "nope"}, ("check",), 3),
    ({"type": "lie_hermitian", "dim": 2}, ("check",), 3),
    ({"type": "lie_hermitian", "dim": 2, "d": {"1": {"1*9": 1}}}, ("check",), 3),
    ({"type": "lie_hermitian", "dim": 2, "d": {"1": {"1*2": "x"}}}, ("check",), 3),
    ({"type": "coordinate", "metric": [["1 +", "0"], ["0", "1"]]}, ("check",), 3),
    ({"type": "catalog", "name": "nope"}, ("check",), 3),
    ({"type": "catalog", "name": "nil3", "params": {"q": 1}}, ("check",), 3),
    ({"type": "catalog", "name": "family_B", "params": {"u": 1, "v": 1, "w": [1, 1]}}, ("check",), 2),
    ({"type": "lie_hermitian", "dim": 2, "d": {"1": {"2*2b": 1}, "2": {"1*1b": 1}}}, ("check",), 2),
    ({"type": "lie_hermitian", "dim": 2, "d": {"1": {"2*2b": 1}, "2": {"1*1b": 1}}}, ("validate",), 2),
    ({"type": "coordinate", "metric": [["1", "0"], ["0", "-1"]]}, ("validate",), 2),
    ({"type": "coordinate", "metric": [["1", "0"], ["0", "1"]]}, ("identities",), 3),
    (None, ("census",), 3),
])
def test_exit_codes(runner, tmp_path, content, args, code):
    path = write(tmp_path, "x.json", catalog_doc("so3c") if content is None else content)
    r = runner.invoke(main, [args[0], path])
    assert r.exit_code == code, r.output
    if code:
        assert r.stderr.strip()


def test_missing_file(runner):
    assert run(runner, "check", "/nonexistent.json").exit_code == 3


def test_stdin_document(runner):
    doc = {"type": "lie_hermitian", "dim": 3, "d": {"3": {"1*1b": 1, "2*2b": [0, 1]}}}
    r = runner.invoke(main, ["classify", "-"], input=json.dumps(doc))
    assert r.exit_code == 0, r.output
    assert json.loads(r.output)["label"] == "BKL"
    assert runner.invoke(main, ["check", "-"], input="nope").exit_code == 3


def test_catalog_emit_errors(runner):
    assert run(runner, "catalog", "emit", "nope").exit_code == 3
    assert run(runner, "catalog", "emit", "nil3", "--params", "[1]").exit_code == 3
    assert run(runner, "catalog", "emit", "family_D", "--params", '{"rho": 3}').exit_code == 2


def test_catalog_list(runner):
    entries = json.loads(run(runner, "catalog", "list").output)["entries"]
    names = {e["name"] for e in entries}
    assert {"so3c", "N3", "nil3", "family_A", "family_B", "family_C", "family_D", "hopf", "wallach"} <= names


def test_console_script_entry_point(tmp_path):
    path = write(tmp_path, "s.json", catalog_doc("so3c"))
    r = subprocess.run([sys.executable, "-m", "bismut_lab.cli", "classify", path], capture_output=True, text=True)
    assert r.returncode == 0
    assert "chern-flat" in json.loads(r.stdout)["label"]
