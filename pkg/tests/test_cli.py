"""Command line interface: report structure, exit codes, determinism."""
import json
import math

import jsonschema
import pytest
import yaml

from flatheat.cli import main

try:
    from importlib.resources import files
except ImportError:  # pragma: no cover
    files = None

SCHEMA = json.loads(files("flatheat").joinpath("report_schema.json").read_text())

HC = f"{math.sqrt(3.0) / 2.0!r}"


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_valid(capsys, argv):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    doc = yaml.safe_load(out)
    jsonschema.validate(doc, SCHEMA)
    return doc


def test_reduce_report(capsys):
    doc = run_valid(capsys, ["reduce", "--u", "3,1", "--v", "1,2"])
    r = doc["results"]
    assert doc["command"] == "reduce"
    assert r["lattice_class"] == "Square"
    assert abs(r["a"]) < 1e-12
    assert abs(r["b"] - 1.0) < 1e-12
    assert abs(r["scale"] - math.sqrt(5.0)) < 1e-12
    assert r["reconstruction_error"] < 1e-12
    assert all(isinstance(x, int) for row in r["basis_change"] for x in row)


def test_classify_report(capsys):
    doc = run_valid(capsys, ["classify", "--a", "0.5", "--b", HC])
    assert doc["results"]["lattice_class"] == "Honeycomb"
    assert doc["surface"]["kind"] == "torus"
    assert abs(doc["surface"]["a"] - 0.5) < 1e-15


def test_kernel_report_both_representations(capsys):
    base = ["kernel", "--a", "0", "--b", "1", "--x", "0,0", "--y", "0.25,0.25",
            "--t", "0.5", "--eps", "1e-11"]
    docs = [run_valid(capsys, base + ["--rep", rep])
            for rep in ("spectral", "image")]
    assert {d["results"]["representation_used"] for d in docs} == \
        {"spectral", "image"}
    vals = [d["results"]["value"] for d in docs]
    assert abs(vals[0] - vals[1]) <= sum(d["results"]["error_bound"]
                                         for d in docs)


def test_kernel_klein_surface_block(capsys):
    doc = run_valid(capsys, ["kernel", "--klein", "--b", "1.5", "--x", "0,0",
                             "--y", "0,0.9", "--t", "0.3"])
    assert doc["surface"]["kind"] == "klein"
    assert doc["results"]["value"] > 0


def test_scan_monotone_report(capsys):
    doc = run_valid(capsys, ["scan", "--a", "0.5", "--b", HC,
                             "--t-list", "0.1,1", "--dirs", "24",
                             "--samples", "12"])
    r = doc["results"]
    assert r["verdict"] == "monotone"
    assert r["witness_count"] == 0
    assert r["points_checked"] == (24 + 5) * 12 * 2


def test_scan_violated_exit_code(capsys):
    code, out, err = run(capsys, ["scan", "--a", "0.3", "--b", "1.2",
                                  "--t-list", "1,2", "--dirs", "24",
                                  "--samples", "16", "--expect", "monotone"])
    assert code == 3
    doc = yaml.safe_load(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["results"]["verdict"] == "violated"
    assert doc["results"]["witness_count"] > 0
    w = doc["results"]["witnesses"][0]
    assert w["radial_derivative"] > w["error_bound"]


def test_counterexample_reports(capsys):
    for argv, kind in [
        (["counterexample", "generic", "--a", "0.3", "--b", "1.2"], "generic"),
        (["counterexample", "isosceles", "--a", "0.3"], "isosceles"),
        (["counterexample", "klein", "--b", "1.5"], "klein-projection"),
        (["counterexample", "klein", "--b", "0.8"], "klein-asymptotic"),
    ]:
        doc = run_valid(capsys, argv)
        assert doc["results"]["kind"] == kind
        assert doc["results"]["increase"] > 0


def test_projection_diag_report(capsys):
    doc = run_valid(capsys, ["projection-diag", "--klein", "--b", "1.3",
                             "--lambda-index", "1", "--grid", "32"])
    r = doc["results"]
    assert r["multiplicity"] == 2
    assert abs(r["eigenvalue"] - (2 * math.pi / 1.3) ** 2) < 1e-9
    assert r["spread"] < 1e-10  # index 1 has a constant diagonal


def test_census_report(capsys):
    doc = run_valid(capsys, ["census", "--a", "0.5", "--b", HC,
                             "--t", "0.5", "--grid", "128"])
    counts = doc["results"]["counts"]
    assert (counts["maxima"], counts["minima"], counts["saddles"]) == (1, 2, 3)
    assert doc["results"]["index_sum"] == 0


def test_pde_check_report(capsys):
    doc = run_valid(capsys, ["pde-check", "--a", "0", "--b", "1",
                             "--t", "0.02", "--n", "32"])
    r = doc["results"]
    assert abs(r["mass_drift"]) < 1e-10
    assert r["rel_linf_error"] < 5e-3


def test_selftest_passes(capsys):
    doc = run_valid(capsys, ["selftest"])
    assert doc["results"]["failed"] == 0
    assert doc["results"]["passed"] == len(doc["results"]["checks"]) == 12
    assert all(c["status"] == "ok" for c in doc["results"]["checks"])


def test_reports_are_deterministic(capsys):
    argv = ["scan", "--a", "0.3", "--b", "1.2", "--t-list", "1",
            "--dirs", "12", "--samples", "8"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


def test_timing_flag_adds_wall_time(capsys):
    doc = run_valid(capsys, ["classify", "--a", "0", "--b", "1", "--timing"])
    assert doc["wall_time_seconds"] >= 0
    doc = run_valid(capsys, ["classify", "--a", "0", "--b", "1"])
    assert "wall_time_seconds" not in doc


def test_csv_output(capsys, tmp_path):
    path = tmp_path / "curve.csv"
    run_valid(capsys, ["kernel", "--a", "0", "--b", "1", "--x", "0,0",
                       "--y", "0,0.3", "--t", "0.25", "--csv", str(path)])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "s,value,derivative,error_bound"
    assert len(lines) > 50
    first = lines[1].split(",")
    assert len(first) == 4
    float(first[1])  # parseable numbers


def test_csv_rejected_for_non_curve_commands(capsys, tmp_path):
    code, _, err = run(capsys, ["classify", "--a", "0", "--b", "1",
                                "--csv", str(tmp_path / "x.csv")])
    assert code == 1
    assert "--csv" in err


def test_usage_errors_exit_1(capsys):
    code, _, _ = run(capsys, ["kernel", "--a", "0", "--b", "1"])
    assert code == 1
    code, _, _ = run(capsys, ["scan", "--a", "0", "--b", "1",
                              "--t-list", "not-a-number"])
    assert code == 1
    code, _, _ = run(capsys, ["no-such-command"])
    assert code == 1


def test_domain_errors_exit_2(capsys):
    code, _, err = run(capsys, ["kernel", "--a", "0", "--b", "1", "--x", "0,0",
                                "--y", "0,0", "--t", "-1"])
    assert code == 2
    assert "NonPositiveTime" in err
    code, _, err = run(capsys, ["census", "--a", "0.3", "--b", "1.2",
                                "--t", "0.5", "--grid", "32"])
    assert code == 2


def test_version_exits_zero(capsys):
    code, out, _ = run(capsys, ["--version"])
    assert code == 0
