import json
import math

import pytest
import yaml

from airan.cli import main
from airan.scenario import (LOAD_BANDS, PRESETS, Experiment, ParseError, ValidationError, dump_scenario,
                            generate_traffic, load_scenario, parse_scenario_text, preset, run_experiment,
                            traffic_fingerprint, with_param)
from airan.simcore import SECOND


def _short(name, horizon=10.0):
    return with_param(preset(name), "horizon_s", horizon)


# -- loading ---------------------------------------------------------------------

def test_twelve_environment_presets_plus_extras():
    env_presets = [n for n in PRESETS if n.split("_")[-1] in LOAD_BANDS]
    assert len(env_presets) == 12
    assert {"standard_diurnal", "minimal"} <= set(PRESETS)


def test_cbd_heavy_prb_band():
    sc = load_scenario("cbd_heavy")
    lo, hi = sc.traffic.prb_range
    assert 0.5 <= lo <= hi <= 0.7


def test_undeclared_app_is_rejected():
    text = dump_scenario(preset("cbd_light")).replace("short_video:", "xr:")
    with pytest.raises(ValidationError, match=r"^traffic\.apps"):
        parse_scenario_text(text)


def test_declaring_the_app_makes_it_valid():
    data = yaml.safe_load(dump_scenario(preset("cbd_light")))
    data["traffic"]["apps"]["xr"] = 0.1
    data["traffic"]["app_latency_ms"] = {"xr": 12.0}
    sc = parse_scenario_text(yaml.safe_dump(data))
    assert sc.base_latency()["xr"] == 12.0


def test_parse_error_carries_line(tmp_path):
    f = tmp_path / "bad.yaml"
    f.write_text("name: x\ntraffic:\n  apps: {a: 1\n  mean_bits: 3\n")
    with pytest.raises(ParseError) as err:
        load_scenario(f)
    assert err.value.line is not None and err.value.line >= 3
    assert str(f) in str(err.value)


@pytest.mark.parametrize("dotted,value", [("horizon_s", 0), ("policy.assurance.expectation", "mean"),
                                          ("policy.energy.threshold", 1.5), ("topology.gnb_count", 0)])
def test_validation_names_failing_path(dotted, value):
    with pytest.raises(ValidationError, match="^" + dotted.replace(".", r"\.")):
        with_param(preset("minimal"), dotted, value)


def test_unknown_key_rejected():
    data = yaml.safe_load(dump_scenario(preset("minimal")))
    data["topology"]["antennas"] = 4
    with pytest.raises(ValidationError, match="topology"):
        parse_scenario_text(yaml.safe_dump(data))


def test_bad_filter_in_collection_task():
    data = yaml.safe_load(dump_scenario(preset("cbd_light")))
    data["collection"][0]["filter"] = "latency > 'x'"
    with pytest.raises(ValidationError, match=r"collection\[0\]\.filter"):
        parse_scenario_text(yaml.safe_dump(data))


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_round_trip(name, tmp_path):
    sc = preset(name)
    f = tmp_path / "s.yaml"
    f.write_text(dump_scenario(sc))
    assert load_scenario(f) == sc


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("/nonexistent/scenario.yaml")


# -- traffic ---------------------------------------------------------------------

def test_zero_rate_no_arrivals():
    sc = with_param(preset("minimal"), "traffic.apps", {"web_browsing": 0.0})
    assert generate_traffic(sc) == []


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_poisson_count_concentration(seed):
    sc = with_param(with_param(preset("minimal"), "horizon_s", 2000.0), "traffic.apps", {"web_browsing": 2.0})
    lam_t = 2.0 * 2000.0
    n = len(generate_traffic(sc, seed))
    assert abs(n - lam_t) <= 4 * math.sqrt(lam_t)


def test_traffic_deterministic_and_seed_sensitive():
    sc = _short("campus_medium")
    assert generate_traffic(sc, 3) == generate_traffic(sc, 3)
    assert traffic_fingerprint(generate_traffic(sc, 3)) != traffic_fingerprint(generate_traffic(sc, 4))


def test_arrivals_ordered_within_horizon():
    sc = _short("hospital_light")
    arr = generate_traffic(sc)
    assert all(0 <= a.time < 10 * SECOND for a in arr)
    assert [(a.time, a.ue) for a in arr] == sorted((a.time, a.ue) for a in arr)


def test_diurnal_thinning_reduces_night_traffic():
    sc = with_param(with_param(preset("minimal"), "horizon_s", 3600.0), "traffic.apps", {"web_browsing": 1.0})
    day = len(generate_traffic(with_param(with_param(sc, "traffic.diurnal", True), "traffic.start_hour", 15.5)))
    night = len(generate_traffic(with_param(with_param(sc, "traffic.diurnal", True), "traffic.start_hour", 3.0)))
    assert night < day


# -- experiments -----------------------------------------------------------------

def test_minimal_has_no_policy_actions():
    d = run_experiment(preset("minimal"))
    assert d.kpis["policy.actions"] == 0


def test_run_is_deterministic():
    sc = _short("cbd_medium")
    assert run_experiment(sc).hash == run_experiment(sc).hash


def test_seed_changes_digest():
    sc = _short("cbd_medium")
    assert run_experiment(sc, seed=1).hash != run_experiment(sc, seed=2).hash


def test_assurance_toggle_keeps_traffic():
    on = _short("cbd_heavy")
    off = with_param(on, "policy.assurance.enabled", False)
    a, b = run_experiment(on), run_experiment(off)
    assert a.kpis["traffic.hash"] == b.kpis["traffic.hash"]
    assert a.hash != b.hash


def test_energy_policy_sweep_ordering():
    sc = _short("standard_diurnal", 5.0)
    joules = {}
    for kind in ("BASELINE", "STATIC_THRESHOLD", "PREDICTIVE", "SERVICE_AWARE"):
        d = run_experiment(with_param(sc, "policy.energy.policies", [kind]))
        joules[kind] = d.kpis[f"energy.{kind}.joules"]
    assert joules["SERVICE_AWARE"] <= joules["PREDICTIVE"] <= joules["STATIC_THRESHOLD"] < joules["BASELINE"]


def test_outputs_written(tmp_path):
    run_experiment(_short("cbd_light", 5.0), tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["scenario"] == "cbd_light" and len(summary["hash"]) == 64
    for name in ("kpi_timeseries", "assurance_log", "repository", "collection", "rca_report"):
        assert (tmp_path / f"{name}.csv").exists()
    assert load_scenario(tmp_path / "scenario.yaml") == _short("cbd_light", 5.0)


# -- CLI -------------------------------------------------------------------------

def test_cli_validate(capsys):
    assert main(["validate", "--scenario", "cbd_heavy"]) == 0
    assert json.loads(capsys.readouterr().out) == {"scenario": "cbd_heavy", "valid": True}


def test_cli_validate_reports_constraint(tmp_path, capsys):
    f = tmp_path / "bad.yaml"
    f.write_text(dump_scenario(preset("cbd_light")).replace("short_video:", "xr:"))
    assert main(["validate", "--scenario", str(f)]) == 2
    assert "traffic.apps" in capsys.readouterr().err


def test_cli_run(tmp_path, capsys):
    f = tmp_path / "s.yaml"
    f.write_text(dump_scenario(preset("minimal")))
    assert main(["run", "--scenario", str(f), "--seed", "3", "--out", str(tmp_path / "out")]) == 0
    run_id, digest = capsys.readouterr().out.split()
    assert run_id == "minimal-seed3"
    assert json.loads((tmp_path / "out" / "summary.json").read_text())["hash"] == digest


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--scenario", "minimal", "--param", "horizon_s=5,10",
                 "--param", "traffic.vip_fraction=0.0,0.5", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4
    rows = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(rows) == 5 and rows[0].startswith("run,hash")


def test_cli_bad_param(tmp_path):
    assert main(["sweep", "--scenario", "minimal", "--param", "nosuch.key=1", "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--scenario", "minimal", "--param", "horizon_s", "--out", str(tmp_path)]) == 2
    assert main(["run", "--scenario", "no_such_preset", "--out", str(tmp_path)]) == 2
