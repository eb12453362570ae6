import json
import os
import pathlib
import subprocess

import pytest

import mcmpbs

SCHEMAS = pathlib.Path(__file__).resolve().parents[2] / "docs" / "schemas"


def validator(name):
    jsonschema = pytest.importorskip("jsonschema")
    from referencing import Registry, Resource

    resources = [
        (p.name, Resource.from_contents(json.loads(p.read_text())))
        for p in SCHEMAS.glob("*.schema.json")
    ]
    schema = json.loads((SCHEMAS / name).read_text())
    return jsonschema.Draft202012Validator(schema, registry=Registry().with_resources(resources))


def test_normalize_strips_signs_and_powers_of_two():
    inst = mcmpbs.normalize([-29, 43, 8, 58])
    assert inst.targets == [29, 43]
    assert inst.width == 7


def test_bounds():
    assert mcmpbs.binary_upper_bound([29, 43]) == 6
    assert mcmpbs.csd_upper_bound([29, 43]) == 5
    assert mcmpbs.csd_upper_bound([3]) == 1


def test_a_operation():
    assert mcmpbs.apply_a_operation(1, 1, l1=3, subtract=True) == 7
    assert mcmpbs.apply_a_operation(7, 1, l1=2) == 29
    with pytest.raises(mcmpbs.McmError):
        mcmpbs.apply_a_operation(1, 1, subtract=True)


def test_encode_sizes_match_prediction_and_round_trip():
    e = mcmpbs.encode([29, 43], 3)
    assert e["trivial"] == "none"
    assert e["opb"].startswith("* #variable= %d #constraint= %d" % (e["variables"], e["constraints"]))
    assert mcmpbs.solve_opb(e["opb"])["status"] == "SAT"
    assert mcmpbs.solve_opb(mcmpbs.encode([29, 43], 2)["opb"])["status"] == "UNSAT"


def test_encode_trivial_instance_has_witness():
    e = mcmpbs.encode([3, 5], 2)
    assert e["trivial"] == "SAT"
    assert e["opb"] == ""
    ok, diags = mcmpbs.verify([3, 5], e["witness"])
    assert ok, diags


def test_unknown_improvement_rejected():
    with pytest.raises(ValueError):
        mcmpbs.encode([29, 43], 3, improvements={"bogus": True})


def test_optimize_worked_pair():
    r = mcmpbs.optimize([29, 43], upper_bound=6)
    assert r["optimal_ops"] == 3
    assert r["proven"]
    assert [lv["ops"] for lv in r["per_level"]] == [5, 4, 3, 2]
    assert [lv["outcome"]["status"] for lv in r["per_level"]] == ["SAT", "SAT", "SAT", "UNSAT"]
    ok, diags = mcmpbs.verify([29, 43], r["graph_text"])
    assert ok, diags
    validator("optimization.schema.json").validate({k: v for k, v in r.items() if k != "graph_text"})


def test_verify_reports_bad_node():
    ok, diags = mcmpbs.verify([29], "7 = 1<<3 - 1\n29 = 7<<2 + 1<<1\n")
    assert not ok
    assert any("node 2" in d for d in diags)


def test_bench_report_matches_schema():
    r = mcmpbs.bench(
        [("single", "45\n# ops: 2\n"), ("under", "5 43\n# ops: 2\n")],
        backends=["internal", "dpll"],
        timeout=30,
    )
    validator("bench.schema.json").validate(r)
    assert [v["status"] for v in r["vbs"]] == ["SAT", "UNSAT"]
    assert r["vbs_solved"] == 2


def test_gen_fir_is_deterministic():
    a = mcmpbs.gen_fir(bits=10, taps=14, seed=7)
    assert a == mcmpbs.gen_fir(bits=10, taps=14, seed=7)
    assert "# seed: 7" in a


def test_predict_size_grows_with_ops():
    sizes = [mcmpbs.predict_size(k, 12) for k in range(2, 7)]
    assert all(a[0] < b[0] and a[1] < b[1] for a, b in zip(sizes, sizes[1:]))


@pytest.mark.skipif(not os.environ.get("MCMPBS_CLI"), reason="command line tool not available")
def test_cli_optimize_report_matches_schema(tmp_path):
    inst = tmp_path / "pair.txt"
    inst.write_text("29 43\n")
    out = subprocess.run([os.environ["MCMPBS_CLI"], "optimize", str(inst)], check=True, capture_output=True, text=True)
    report = json.loads(out.stdout)
    validator("optimization.schema.json").validate(report)
    assert report["optimal_ops"] == 3
