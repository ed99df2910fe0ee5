"""CLI verbs, config validation, report files, determinism, exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from extremals.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(verb, config, out, *extra):
    return main([verb, "--config", str(config), "--out", str(out), *extra])


def test_classify_cprime(tmp_path, capsys):
    code = run("classify", CONFIGS / "rotation_cprime.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "classify.json").read_text())
    assert payload["scenario"] == "Cprime"
    assert payload["d"] == pytest.approx(4.0, rel=1e-9)
    assert np.allclose(payload["u_plus"], [0.8, 0.6], atol=1e-9)
    assert np.allclose(payload["u_minus"], [-0.8, 0.6], atol=1e-9)
    assert payload["codim1"]["holds"] is True
    assert payload["singular_arc"] == "contradiction_norm"
    assert "scenario: Cprime" in capsys.readouterr().out


def test_classify_double_integrator(tmp_path):
    code = run("classify", CONFIGS / "double_integrator.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "classify.json").read_text())
    assert payload["scenario"] == "A"
    assert payload["d"] == pytest.approx(1.0, abs=1e-9)


def test_classify_commuting_boundary(tmp_path):
    code = run("classify", CONFIGS / "commuting.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "classify.json").read_text())
    assert payload["scenario"] == "CondEqqFails"
    assert payload["codim1"]["holds"] is False


def test_integrate_writes_reports_and_figures(tmp_path):
    code = run("integrate", CONFIGS / "rotation_cprime.json", tmp_path)
    assert code == 0
    for name in ("trajectory.csv", "trajectory.png", "switches.json",
                 "integrate.txt"):
        assert (tmp_path / name).exists()
    payload = json.loads((tmp_path / "switches.json").read_text())
    assert payload["n_switches"] == 1
    sw = payload["switches"][0]
    assert sw["discrepancy_before"] < 1e-6
    assert sw["discrepancy_after"] < 1e-12
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x1,x2,x3,rho,u1,u2,h3"


def test_integrate_cdoubleprime_no_switch(tmp_path):
    code = run("integrate", CONFIGS / "rotation_cdoubleprime.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "switches.json").read_text())
    assert payload["n_switches"] == 0
    assert payload["min_rho"] > 0.0
    assert payload["envelope"]["ok"] is True
    assert payload["envelope"]["alpha"] > 0.0
    assert (tmp_path / "envelope.png").exists()


def test_sphere_cdoubleprime_reports_routes(tmp_path):
    code = run("sphere", CONFIGS / "rotation_cdoubleprime.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "sphere.json").read_text())
    assert payload["scenario"] == "Cdoubleprime"
    assert payload["lift_route_deviation"] < 1e-6
    assert "forward_error" not in payload


def test_threshold_crossing_exits_nonzero(tmp_path, capsys):
    # rho dips to about 0.6 * rho0 on this instance; a threshold above that
    # makes the crossing fire inside the no-switch scenario, a reported error
    code = run("integrate", CONFIGS / "rotation_cdoubleprime.json", tmp_path,
               "--eps-switch", "0.009")
    assert code == 1
    assert "C''" in capsys.readouterr().err


def test_integrate_deterministic_outputs(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run("integrate", CONFIGS / "double_integrator.json", out1) == 0
    assert run("integrate", CONFIGS / "double_integrator.json", out2) == 0
    for name in ("trajectory.csv", "switches.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_sphere_reports(tmp_path):
    code = run("sphere", CONFIGS / "rotation_cprime.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "sphere.json").read_text())
    assert payload["forward_error"] < 1e-6
    assert payload["backward_error"] < 1e-6
    assert payload["lift_route_deviation"] < 1e-6
    assert payload["max_sphere_drift"] < 1e-9
    assert (tmp_path / "sphere.png").exists()
    assert (tmp_path / "sphere.csv").exists()


def test_validate_shipped_configs_pass(tmp_path):
    for name in ("rotation_cprime.json", "double_integrator.json",
                 "rotation_cdoubleprime.json"):
        out = tmp_path / name.split(".")[0]
        assert run("validate", CONFIGS / name, out) == 0
        payload = json.loads((out / "validate.json").read_text())
        assert payload["passed"] is True


def test_oracle_verb(tmp_path):
    code = run("oracle", CONFIGS / "rotation_cprime.json", tmp_path)
    assert code == 0
    payload = json.loads((tmp_path / "oracle.json").read_text())
    assert payload["n_zero_clusters"] == 2
    assert payload["membership_min_distance"] == pytest.approx(2.0, abs=1e-6)


def test_missing_config_is_input_error(tmp_path):
    assert run("classify", tmp_path / "nope.json", tmp_path) == 2


def test_malformed_json_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json }")
    assert run("classify", bad, tmp_path) == 2


def test_schema_error_mentions_path(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"system": {"n": 2, "k": 1, "drift": "x2; 0",
                                          "controlled": ["0; 1"]}}))
    assert run("classify", bad, tmp_path) == 2
    assert "anchor" in capsys.readouterr().err


def test_field_error_is_input_error(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "rotation_cprime.json").read_text())
    cfg["system"]["drift"] = "0; 0; 1 - 5*y1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    assert run("classify", bad, tmp_path) == 2
    assert "unknown identifier" in capsys.readouterr().err


def test_eps_switch_override(tmp_path):
    code = run("integrate", CONFIGS / "rotation_cprime.json", tmp_path,
               "--eps-switch", "1e-4")
    assert code == 0
    payload = json.loads((tmp_path / "switches.json").read_text())
    assert payload["n_switches"] == 1
