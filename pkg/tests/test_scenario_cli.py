import csv
import io
import math
import re
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsfso.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, main
from irsfso.scenario import (
    TEMPLATES,
    ConfigError,
    IrsConfig,
    McConfig,
    ScenarioConfig,
    SweepConfig,
    dumps_config,
    load_config,
    loads_config,
    run_sweep,
    save_config,
    template,
    validate,
    write_csv,
)


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# irsfso ")
    return list(csv.DictReader(lines[1:]))


def test_defaults_round_trip(tmp_path):
    cfg = ScenarioConfig()
    assert loads_config(dumps_config(cfg)) == cfg
    assert loads_config("") == cfg
    p = tmp_path / "s.ini"
    save_config(cfg, p)
    assert load_config(p) == cfg


@pytest.mark.parametrize("name", sorted(TEMPLATES))
def test_templates_round_trip(name):
    _, cfg = template(name)
    assert loads_config(dumps_config(cfg)) == cfg


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(100.0, 1e4), st.integers(1, 4), st.integers(0, 2**31))
def test_round_trip_property(theta, dist, q, seed):
    cfg = ScenarioConfig()
    src = (replace(cfg.sources[0], theta_rad=theta, distance_m=dist),) + cfg.sources[1:]
    cfg = replace(cfg, sources=src, irs=IrsConfig(tiles_irsd=(2, 1), tiles_irsh=(4 * q, 2)), mc=McConfig(trials=10, seed=seed))
    assert loads_config(dumps_config(cfg)) == cfg


def test_angles_accept_pi_expressions():
    cfg = loads_config("[ls1]\ntheta_rad = pi/3\n[pd1]\ntheta_rad = 2pi/3\n")
    assert cfg.sources[0].theta_rad == pytest.approx(math.pi / 3)
    assert cfg.receivers[0].theta_rad == pytest.approx(2 * math.pi / 3)


@pytest.mark.parametrize(
    "text,where",
    [
        ("[irs]\nzeta0 = 1.5\n", "[irs] zeta0"),
        ("[irs]\nbogus = 1\n", "[irs] bogus"),
        ("[nonsense]\nx = 1\n", "nonsense"),
        ("[ls1]\ntheta_rad = 0\n", "[ls1] theta_rad"),
        ("[mc]\ntrials = many\n", "[mc] trials"),
        ("[sweep]\nvariable = colour\n", "[sweep] variable"),
    ],
)
def test_config_errors_name_the_key(text, where):
    with pytest.raises(ConfigError, match=re.escape(where)):
        loads_config(text)


def test_unknown_template():
    with pytest.raises(ConfigError):
        template("no-such-template")


def test_sweep_points():
    assert SweepConfig("d_p", values=(1.0, 2.0)).points() == (1.0, 2.0)
    pts = SweepConfig("theta_p1", start=0.6, stop=1.5, steps=10).points()
    assert len(pts) == 10 and pts[0] == pytest.approx(0.6) and pts[-1] == pytest.approx(1.5)


def test_regimes_table_labels():
    t = run_sweep(ScenarioConfig(), "regimes")
    i = t.columns.index("regime")
    assert {r[i] for r in t.rows} <= {"near", "intermediate", "far"}
    buf = io.StringIO()
    write_csv(t, buf)
    rows = read_csv(buf.getvalue())
    assert len(rows) == len(t.rows)


def test_field_map_oracle_column():
    cfg = ScenarioConfig()
    t = run_sweep(cfg, "field-map", protocols=["td"], profiles=["lp"], oracle="separable1d")
    i = t.columns.index("rel_err")
    assert max(r[i] for r in t.rows) < 1e-6


def test_validate_suites_report_checks():
    checks = validate(ScenarioConfig(), "regimes")
    assert checks and all(c.passed for c in checks)
    fields = validate(ScenarioConfig(), "fields")
    assert all(c.passed for c in fields)


def test_cli_regimes_to_file(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["regimes", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out.read_text())
    assert rows and "d_f_m" in rows[0]


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[irs]\nzeta0 = 2\n")
    assert main(["regimes", "--config", str(bad)]) == EXIT_CONFIG
    assert "[irs] zeta0" in capsys.readouterr().err


def test_cli_config_and_template_are_exclusive(tmp_path):
    p = tmp_path / "s.ini"
    save_config(ScenarioConfig(), p)
    assert main(["regimes", "--config", str(p), "--template", "gml-distance"]) == EXIT_CONFIG


def test_cli_validate_exit_codes(tmp_path):
    assert main(["validate", "regimes", "--out", str(tmp_path / "v.csv")]) == EXIT_OK
    # the analytic GML misses the 1e-3 lens-quadrature target at 1-5 km
    assert main(["validate", "gml", "--out", str(tmp_path / "g.csv")]) == EXIT_VALIDATION
    rows = read_csv((tmp_path / "g.csv").read_text())
    assert any(r["status"] == "FAIL" for r in rows) and any(r["status"] == "PASS" for r in rows)


def test_cli_ber_small_run(tmp_path):
    out = tmp_path / "b.csv"
    args = ["ber", "--template", "ber-aligned", "--trials", "2000", "--seed", "3", "--protocol", "td", "--profile", "qp", "--out", str(out)]
    assert main(args) == EXIT_OK
    rows = read_csv(out.read_text())
    assert {r["protocol"] for r in rows} == {"td"} and {r["profile"] for r in rows} == {"qp"}
    assert len(rows) == 9
