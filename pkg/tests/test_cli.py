from __future__ import annotations

import json

import numpy as np
import pytest

from derivlab.cli import canonical, main, run, validate
from derivlab.errors import UnknownFixture, ValidationErrors
from derivlab.fixtures import NAMES, fixture

NON_ASSOCIATIVE = [[[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[0, 1, 0], [0, 0, 0], [0, 1, 0]], [[0, 0, 1], [0, 1, 0], [0, 0, 0]]]


def write(tmp_path, obj, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def by_task(report):
    return {t["task"]: t for t in report["tasks"]}


# -- fixtures and validation ---------------------------------------------------------


@pytest.mark.parametrize("name", NAMES)
def test_every_fixture_validates(name):
    sc = validate(fixture(name))
    assert sc.tasks and sc.group is not None


def test_fixture_shapes():
    z3 = validate(fixture("z3_gl1_f3"))
    assert (z3.group.order, z3.residual.n, z3.residual.p) == (3, 1, 3)
    s3 = validate(fixture("s3_gl2_f5"))
    assert (s3.group.order, s3.residual.n, s3.residual.p) == (6, 2, 5)


def test_fixture_command_is_canonical(capsys, tmp_path):
    code, out = run_cli(capsys, "fixture", "s3_gl2_f5")
    assert code == 0
    assert out == canonical(json.loads(out))
    path = tmp_path / "f.json"
    assert main(["fixture", "z3_gl1_f3", "--out", str(path)]) == 0
    assert json.loads(path.read_text()) == fixture("z3_gl1_f3")


def test_unknown_fixture(capsys):
    with pytest.raises(UnknownFixture):
        fixture("nope")
    assert main(["fixture", "nope"]) == 2


def test_validate_bundled_scenario(capsys, tmp_path):
    code, out = run_cli(capsys, "validate", write(tmp_path, fixture("s3_gl2_f5")))
    assert code == 0 and json.loads(out)["valid"] is True


def test_non_associative_ring_names_the_triple():
    sc = fixture("z3_gl1_f3")
    sc["rings"]["bad"] = {"kind": "structure", "p": 3, "e": 1, "rank": 3, "mul": NON_ASSOCIATIVE, "one": [1, 0, 0]}
    with pytest.raises(ValidationErrors) as exc:
        validate(sc)
    assert any("rings.bad" in e and "(1,2,2)" in e for e in exc.value.errors)


def test_missing_generator_reference():
    sc = fixture("s3_gl2_f5")
    sc["places"][0]["words"] = [[3]]
    with pytest.raises(ValidationErrors) as exc:
        validate(sc)
    assert any("missing generator" in e for e in exc.value.errors)


def test_errors_are_collected_not_fail_fast(capsys, tmp_path):
    sc = fixture("s3_gl2_f5")
    sc["places"][0]["words"] = [[3]]
    sc["lift_ring"] = "nowhere"
    sc["tasks"].append("no-such-task")
    sc["representation"]["generators"] = sc["representation"]["generators"][:1]
    with pytest.raises(ValidationErrors) as exc:
        validate(sc)
    assert len(exc.value.errors) >= 4
    code, out = run_cli(capsys, "validate", write(tmp_path, sc))
    assert code == 2 and len(json.loads(out)["errors"]) == len(exc.value.errors)


def test_non_homomorphism_is_rejected():
    sc = fixture("s3_gl2_f5")
    sc["representation"]["generators"][0] = [[2, 0], [0, 1]]
    with pytest.raises(ValidationErrors):
        validate(sc)


def test_weak_presentation_is_rejected():
    sc = fixture("s3_gl2_f5")
    sc["group"] = dict(sc["group"], relations=[[1, 1], [2, 2, 2]])
    with pytest.raises(ValidationErrors) as exc:
        validate(sc)
    assert any("group.relations" in e for e in exc.value.errors)


def test_parse_error(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code, out = run_cli(capsys, "validate", str(path))
    assert code == 2 and not json.loads(out)["valid"]
    code, _ = run_cli(capsys, "run", str(tmp_path / "missing.json"))
    assert code == 2


# -- running tasks --------------------------------------------------------------------


def test_tangent_on_z3_counts_three(capsys, tmp_path):
    code, out = run_cli(capsys, "run", write(tmp_path, fixture("z3_gl1_f3")), "--task", "tangent")
    assert code == 0
    res = by_task(json.loads(out))["tangent"]
    assert res["verdict"] == "Pass"
    assert res["result"]["framed_lifts"] == res["result"]["Z1_size"] == 3
    assert res["result"]["bijection"]["injective"]


def test_star_is_all_exact(capsys, tmp_path):
    code, out = run_cli(capsys, "run", write(tmp_path, fixture("s3_gl2_f5")), "--task", "star")
    t = by_task(json.loads(out))["star"]
    assert code == 0 and t["verdict"] == "Pass"
    assert set(t["result"]["verdicts"].values()) == {"Exact"}


def test_doldkan_roundtrip_reports_each_complex():
    sc = validate(fixture("z3_gl1_f3"))
    t = by_task(run(sc, ["doldkan-roundtrip"]))["doldkan-roundtrip"]
    assert t["verdict"] == "Pass" and len(t["result"]["complexes"]) == 20
    assert all(c["roundtrip"] and c["homotopy"] for c in t["result"]["complexes"])


def test_budget_is_a_task_level_failure(capsys, tmp_path):
    path = write(tmp_path, fixture("s3_gl2_f5"))
    code, out = run_cli(capsys, "run", path, "--task", "deform", "--task", "cohomology", "--budget", "10")
    report = json.loads(out)
    assert code == 1
    deform = by_task(report)["deform"]
    assert deform["verdict"] == "Fail" and deform["error"]["type"] == "BudgetExceeded"
    assert by_task(report)["cohomology"]["verdict"] == "Pass"
    assert [t["task"] for t in report["tasks"]] == ["deform", "cohomology"]


def test_budget_from_environment(monkeypatch):
    sc = validate(fixture("s3_gl2_f5"))
    monkeypatch.setenv("DERIVLAB_BUDGET", "10")
    report = run(sc, ["tangent"])
    assert report["tasks"][0]["error"]["type"] == "BudgetExceeded"


def test_expect_mismatch_fails(capsys, tmp_path):
    sc = fixture("z3_gl1_f3")
    sc["tasks"] = [{"task": "deform", "expect": {"framed_lifts": 4}}]
    code, out = run_cli(capsys, "run", write(tmp_path, sc))
    t = json.loads(out)["tasks"][0]
    assert code == 1 and t["verdict"] == "Fail"
    assert t["expect_mismatch"] == {"framed_lifts": {"expected": 4, "got": 3}}


def test_inconclusive_exits_zero(capsys, tmp_path):
    code, out = run_cli(capsys, "run", write(tmp_path, fixture("z10_quasi_lift")), "--task", "pseudochar-reflect")
    assert code == 0 and json.loads(out)["summary"]["Inconclusive"] == 1


def test_obstruction_fixture(capsys, tmp_path):
    code, out = run_cli(capsys, "run", write(tmp_path, fixture("zp2_obstruction")))
    t = json.loads(out)["tasks"][0]
    assert code == 0 and t["result"]["zero"] is False and t["result"]["lift_found"] is False
    assert t["result"]["section_independent"]


def test_unknown_task_selector(capsys, tmp_path):
    code, _ = run_cli(capsys, "run", write(tmp_path, fixture("z3_gl1_f3")), "--task", "bogus")
    assert code == 2


def test_reports_are_byte_identical_across_threads(capsys, tmp_path):
    path = write(tmp_path, fixture("zl_coprime"))
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"r{threads}.json"
        assert main(["run", path, "--threads", threads, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["schema_version"] == 1 and "seconds" not in report["tasks"][0]


def test_timings_are_opt_in(capsys, tmp_path):
    code, out = run_cli(capsys, "run", write(tmp_path, fixture("z3_gl1_f3")), "--task", "cohomology", "--timings")
    assert "seconds" in json.loads(out)["tasks"][0]


def test_coordinate_matrices_are_accepted():
    sc = fixture("z10_quasi_lift")
    sc["quasi_lift"]["sigma"] = [[[[4, 0], [0, 0]], [[0, 0], [4, 0]]]]
    q = validate(sc).quasi
    assert np.array_equal(q.rho, validate(fixture("z10_quasi_lift")).quasi.rho)
