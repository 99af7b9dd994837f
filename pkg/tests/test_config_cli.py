import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxdynamo import cli
from fluxdynamo.config import parse_config
from fluxdynamo.errors import ConfigError
from fluxdynamo.output import format_value, render_csv, render_json
from fluxdynamo.report import Verdict, build_report
from fluxdynamo.scenarios import SCENARIOS, evaluate

RADIAL_SWEEP = "[radial_modes]\ngamma = 0\nsweep = eta 1e-6 1e-1 6 log\n"


def write(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_bytes(text.encode())
    return p


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- config parsing -----------------------------------------------------------


def test_parse_full_config():
    cfg = parse_config(
        "# comment\n; also comment\n[euclidean_fast]\ntau0 = 0.1\nv0 = 0.1\nsweep = c1 0 1 3\n"
        "output = out.csv\nformat = json\n"
    )
    assert cfg.scenario == "euclidean_fast"
    assert cfg.parameters == {"tau0": 0.1, "v0": 0.1}
    assert [c["c1"] for c in cfg.cells()] == [0.0, 0.5, 1.0]
    assert cfg.output == "out.csv" and cfg.format == "json"


def test_log_sweep_values():
    cfg = parse_config(RADIAL_SWEEP)
    etas = [c["eta"] for c in cfg.cells()]
    assert etas[0] == pytest.approx(1e-6) and etas[-1] == pytest.approx(1e-1)
    assert etas[3] == pytest.approx(1e-3)


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("[radial_modes]\neta = 1\nbogus = 2\n", 3, "bogus"),
        ("[nope]\n", 1, "nope"),
        ("[radial_modes]\neta = 1\neta = 2\n", 3, "duplicate"),
        ("[radial_modes]\ngamma = 1\n", 1, "eta"),
        ("[radial_modes]\neta = abc\n", 2, "not a number"),
        ("[radial_modes]\neta = 1\nsweep = gamma 0 1 1\n", 3, "count"),
        ("[radial_modes]\neta = 1\nsweep = gamma 0 1\n", 3, "sweep"),
        ("[radial_modes]\neta = 1\nsweep = gamma 0 1 3 cubic\n", 3, "spacing"),
        ("[radial_modes]\neta = 1\nformat = xml\n", 3, "format"),
        ("eta = 1\n", 1, "header"),
        ("[radial_modes]\n[radial_modes]\n", 2, "one"),
        ("[heliotron]\ntau0 = 1\nm = 1.5\n", 3, "integer"),
        ("[radial_modes]\neta = nan\n", 2, "finite"),
        ("[radial_modes]\njust text\n", 2, "key = value"),
    ],
)
def test_config_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "x.cfg")
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert str(exc.value).startswith(f"x.cfg:{line}:")


@settings(max_examples=50, deadline=None)
@given(key=st.from_regex(r"[a-z][a-z_]{0,12}", fullmatch=True))
def test_unknown_keys_always_rejected_by_name(key):
    if key in SCENARIOS["radial_modes"].params or key in ("sweep", "output", "format"):
        return
    with pytest.raises(ConfigError) as exc:
        parse_config(f"[radial_modes]\neta = 1\n{key} = 1\n")
    assert key in str(exc.value)


# --- serialization ------------------------------------------------------------


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(1e-6) == "9.9999999999999995e-07"
    assert format_value(3) == "3"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(1 + 2j) == "1+2j"
    assert format_value(float("inf")) == "inf"


def test_csv_uses_lf_and_header():
    text = render_csv(["a", "b"], [{"a": 1.5, "b": "x,y"}])
    assert text == 'a,b\n1.5,"x,y"\n'


def test_json_handles_complex_and_non_finite():
    payload = json.loads(render_json({"z": 1 + 2j, "inf": math.inf, "x": 0.1}))
    assert payload == {"z": {"re": 1.0, "im": 2.0}, "inf": "inf", "x": 0.1}


@settings(max_examples=200, deadline=None)
@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_csv_floats_round_trip(x):
    assert float(format_value(x)) == x


# --- scenarios ----------------------------------------------------------------

MINIMAL = {
    "diffusive_filament": {"eta": 0.05},
    "euclidean_fast": {"tau0": 0.1, "v0": 0.1},
    "heliotron": {"tau0": 1.0},
    "radial_modes": {"eta": 1e-3},
    "chicone_latushkin": {"kappa": -1.0},
    "curvature_report": {},
    "stretch_analysis": {},
}


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_every_scenario_evaluates_with_declared_outputs(name):
    res = evaluate(name, MINIMAL[name])
    assert set(res.outputs) == set(SCENARIOS[name].outputs)
    assert res.sources
    assert res.dynamo_class in ("fast", "slow", "marginal", "decaying", "n/a")


def test_scenario_labels():
    assert evaluate("euclidean_fast", {"tau0": 0.1, "v0": 0.1}).dynamo_class == "fast"
    assert evaluate("chicone_latushkin", {"kappa": 0.0}).dynamo_class == "marginal"
    assert evaluate("chicone_latushkin", {"kappa": -1.0}).dynamo_class == "fast"


# --- CLI run ------------------------------------------------------------------


def test_radial_sweep_rows(tmp_path, capsys):
    code, out, _ = run(["run", write(tmp_path, RADIAL_SWEEP)], capsys)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 6
    for row in rows:
        assert float(row["n_plus_oracle"]) == -1.0 and float(row["n_minus_oracle"]) == -2.0
        assert float(row["n_plus_quoted"]) == 2.0 and float(row["n_minus_quoted"]) == -5.0
        assert row["quoted_roots_verdict"] == "inconsistent"
        assert row["status"] == "ok" and row["sources"]


def test_chicone_latushkin_sweep(tmp_path, capsys):
    code, out, _ = run(["run", write(tmp_path, "[chicone_latushkin]\nsweep = kappa -2 0 5\n")], capsys)
    assert code == 0
    for row in rows_of(out):
        kappa = float(row["kappa"])
        assert float(row["growth_rate"]) == pytest.approx(0.5 * math.sqrt(-4 * kappa), rel=1e-15, abs=0)
    assert float(rows_of(out)[-1]["growth_rate"]) == 0.0


def test_diffusionless_filament_single_row(tmp_path, capsys):
    code, out, _ = run(["run", write(tmp_path, "[diffusive_filament]\neta = 0\nB0 = 2.5\n")], capsys)
    rows = rows_of(out)
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["B_s_end"]) == 2.5


def test_config_error_exit_code(tmp_path, capsys):
    code, out, err = run(["run", write(tmp_path, "[radial_modes]\neta = 1\nbogus = 2\n")], capsys)
    assert code == 2 and out == ""
    assert ":3:" in err and "bogus" in err


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(["run", tmp_path / "absent.cfg"], capsys)
    assert code == 2 and "cannot read" in err


def test_partial_failure_marks_cell_and_continues(tmp_path, capsys):
    # v0 = 0 is singular for the fast-dynamo normal field; other cells still run
    code, out, err = run(["run", write(tmp_path, "[euclidean_fast]\ntau0 = 0.1\nsweep = v0 -1 1 3\n")], capsys)
    assert code == 3
    rows = rows_of(out)
    assert [r["status"].split(":")[0] for r in rows] == ["ok", "error", "ok"]
    assert "SingularParameterError" in rows[1]["status"]
    assert "1 of 3" in err


def test_jobs_preserve_order_and_bytes(tmp_path, capsys):
    cfg = write(tmp_path, "[chicone_latushkin]\neta = 0.1\nsweep = kappa -2 2 41\n")
    _, serial, _ = run(["run", cfg], capsys)
    _, parallel, _ = run(["run", cfg, "--jobs", "8"], capsys)
    assert serial == parallel


def test_output_file_and_json(tmp_path, capsys):
    cfg = write(tmp_path, RADIAL_SWEEP + "output = res/out.csv\nformat = json\n")
    code, out, _ = run(["run", cfg], capsys)
    assert code == 0 and out == ""
    data = json.loads((tmp_path / "res" / "out.csv").read_text())
    assert len(data["rows"]) == 6 and data["rows"][0]["n_plus_oracle"] == -1.0
    explicit = tmp_path / "x.csv"
    run(["run", cfg, "--output", explicit, "--format", "csv"], capsys)
    assert explicit.read_bytes().startswith(b"index,scenario,eta,gamma,")


def test_dash_output_overrides_config_destination(tmp_path, capsys):
    cfg = write(tmp_path, RADIAL_SWEEP + "output = out.csv\n")
    code, out, _ = run(["run", cfg, "--output", "-"], capsys)
    assert code == 0 and out.startswith("index,scenario,eta,gamma,")
    assert not (tmp_path / "out.csv").exists()


def test_bad_cli_options(tmp_path, capsys):
    cfg = write(tmp_path, RADIAL_SWEEP)
    assert run(["run", cfg, "--jobs", "0"], capsys)[0] == 2
    assert run(["run", cfg, "--tolerance", "-1"], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, RADIAL_SWEEP)
    proc = subprocess.run([sys.executable, "-m", "fluxdynamo", "run", str(cfg)], capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.count(b"\n") == 7 and b"\r" not in proc.stdout


# --- discrepancy report ---------------------------------------------------------

CURVATURE_IDS = {
    "riemann_rsrs.chain_1", "riemann_rsrs.chain_2", "riemann_rsrs.chain_3",
    "riemann_thetas_thetas.chain_1", "riemann_thetas_thetas.chain_2", "riemann_rsrs.thin_tube",
}
OTHER_IDS = {
    "radial_modes.quadratic_roots", "radial_modes.quoted_roots.plus", "radial_modes.quoted_roots.minus",
    "radial_modes.marginal_exponents.plus", "radial_modes.marginal_exponents.minus",
    "radial_modes.growth_rates.plus", "radial_modes.growth_rates.minus",
    "filament_decay.closed_form", "filament_decay.governing_equation", "filament_decay.helical_constraint",
    "heliotron.nondynamo_torsion", "zeldovich.marginal_condition", "anosov_rate.flat_limit",
}


@pytest.fixture(scope="module")
def default_report():
    return build_report(parse_config("[curvature_report]\n"))


def test_report_is_total(default_report):
    assert len(default_report.entries) >= 5
    assert default_report.ids() == CURVATURE_IDS | OTHER_IDS
    points = {e.point for e in default_report.entries if e.equation_id in CURVATURE_IDS}
    for pt in points:
        ids = {e.equation_id for e in default_report.entries if e.point == pt}
        assert CURVATURE_IDS <= ids
    for eid in OTHER_IDS:
        assert len(default_report.find(eid)) == 1


def test_report_verdicts(default_report):
    def verdict(eid):
        (entry,) = default_report.find(eid)
        return entry.verdict

    assert verdict("radial_modes.quoted_roots.plus") is Verdict.INCONSISTENT
    assert default_report.find("radial_modes.quoted_roots.plus")[0].abs_gap == 3.0
    assert verdict("radial_modes.quadratic_roots") is Verdict.CONSISTENT
    assert verdict("zeldovich.marginal_condition") is Verdict.CONSISTENT
    assert verdict("anosov_rate.flat_limit") is Verdict.CONSISTENT
    assert verdict("filament_decay.closed_form") is Verdict.CONSISTENT
    assert verdict("filament_decay.governing_equation") is Verdict.INCONSISTENT
    assert verdict("filament_decay.helical_constraint") is Verdict.DIMENSIONAL_WARNING
    assert verdict("heliotron.nondynamo_torsion") is Verdict.DIMENSIONAL_WARNING
    assert all(e.verdict is Verdict.INCONSISTENT for e in default_report.find("riemann_rsrs.thin_tube"))
    assert all(e.verdict is Verdict.CONSISTENT for e in default_report.find("riemann_rsrs.chain_1"))
    assert default_report.metadata["re_m_threshold_quoted"] == 210.0


def test_report_uses_radial_config_point():
    rep = build_report(parse_config("[radial_modes]\neta = 0.1\ngamma = 0.3\n"))
    (plus,) = rep.find("radial_modes.growth_rates.plus")
    assert plus.verdict is Verdict.INCONSISTENT
    assert plus.quoted_values[0] == pytest.approx(-0.3)


def test_report_requires_supported_scenario(tmp_path, capsys):
    code, _, err = run(["report", write(tmp_path, "[chicone_latushkin]\nkappa = 1\n")], capsys)
    assert code == 2 and "curvature_report or radial_modes" in err


def test_report_cli_outputs(tmp_path, capsys):
    cfg = write(tmp_path, "[radial_modes]\neta = 1e-3\noutput = r.csv\n")
    code, out, _ = run(["report", cfg], capsys)
    assert code == 0 and out == ""
    rows = rows_of((tmp_path / "r_report.csv").read_text())
    verdicts = {(r["equation_id"], r["verdict"]) for r in rows}
    assert ("radial_modes.quoted_roots.plus", "inconsistent") in verdicts
    code, out, _ = run(["report", cfg, "--format", "json", "--output", tmp_path / "r.json"], capsys)
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["metadata"]["re_m_threshold_quoted"] == 210.0


def test_report_tolerance_option(tmp_path, capsys):
    cfg = write(tmp_path, "[curvature_report]\n")
    _, out, _ = run(["report", cfg, "--tolerance", "10"], capsys)
    rows = {r["equation_id"]: r for r in rows_of(out)}
    assert rows["radial_modes.quoted_roots.plus"]["verdict"] == "consistent"
