import json
import math
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loglevy.charfun import selection_a
from loglevy.cli import (
    EXIT_CROSS_CHECK,
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    OUTPUT_DIR_ENV,
    OutputRecord,
    figure_checks_pass,
    figure_record,
    format_number,
    main,
    read_record,
    serialize,
)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def record_of(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_OK, err
    return read_record(out)


# --- serialization ------------------------------------------------------------


def test_format_number():
    assert format_number(3) == "3"
    assert format_number(1.0) == "1.0"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(1e300) == "1.0000000000000001e+300"
    assert format_number(math.inf) == "Infinity"
    assert format_number(-math.inf) == "-Infinity"
    assert format_number(math.nan) == "NaN"
    assert format_number(True) == "true"


@given(st.floats(allow_nan=False))
def test_format_number_round_trips(x):
    assert float(format_number(x)) == x


def test_record_rejects_ragged_rows():
    with pytest.raises(ValueError):
        OutputRecord("x", {}, ["a", "b"], [[1, 2], [3]])


cells = st.one_of(st.integers(-10**6, 10**6), st.floats(allow_nan=False),
                  st.sampled_from(["pass", "fail", "exact", "a, \"quoted\" cell"]))


@given(st.lists(st.lists(cells, min_size=3, max_size=3), max_size=6), st.sampled_from(["csv", "json"]))
def test_serialize_round_trip(rows, fmt):
    rec = OutputRecord("x", {"alpha": 0.5, "grid": [0.0, 1.5], "seed": 7, "none": None}, ["a", "b", "c"],
                       rows, {"note": "ok", "flag": True})
    assert read_record(serialize(rec, fmt)) == rec


def test_csv_layout():
    rec = OutputRecord("x", {"alpha": 0.5}, ["n", "p"], [[0, 0.25]])
    text = serialize(rec, "csv")
    lines = text.split("\r\n")
    assert lines[0].startswith("# {")
    header = json.loads(lines[0][2:])
    assert header["schema_version"] == "1" and header["command"] == "x"
    assert lines[1] == "n,p"
    assert lines[2] == "0,0.25"


def test_json_layout():
    rec = OutputRecord("x", {"alpha": 0.5}, ["n", "p"], [[0, 0.25]])
    doc = json.loads(serialize(rec, "json"))
    assert doc["schema_version"] == "1"
    assert {"command", "parameters", "columns", "rows"} <= set(doc)


# --- commands -----------------------------------------------------------------


def test_pmf_L(capsys):
    rec = record_of(["pmf", "--process", "L", "--alpha", "0.5", "--t", "1", "--n-max", "10"], capsys)
    assert rec.columns[:2] == ["n", "probability"]
    assert len(rec.rows) == 11
    assert rec.rows[0][1] == pytest.approx(0.5 / math.log(2), rel=1e-15)
    assert rec.metadata["tail_bound"] == pytest.approx(1 - math.fsum(r[1] for r in rec.rows), abs=1e-12)
    assert rec.parameters["n_max"] == 10 and rec.parameters["format"] == "csv"


def test_pmf_Z(capsys):
    rec = record_of(["pmf", "--process", "Z", "--alpha", "0.5", "--b", "2", "--t", "1", "--n-max", "5"],
                    capsys)
    theta = 2 * (1 - 0.5 / math.log(2))
    assert rec.rows[0][1] == pytest.approx(math.exp(-theta), rel=1e-14)


def test_pmf_n_max_zero(capsys):
    rec = record_of(["pmf", "--process", "L", "--alpha", "0.5", "--t", "1", "--n-max", "0"], capsys)
    assert len(rec.rows) == 1
    assert rec.metadata["tail_bound"] == pytest.approx(1 - rec.rows[0][1], rel=1e-12)


def test_levy_L(capsys):
    rec = record_of(["levy", "--process", "L", "--alpha", "0.5", "--n-max", "5"], capsys)
    assert rec.columns == ["n", "levy_measure", "cumulative_mass"]
    assert rec.rows[0][1] == pytest.approx(0.25, rel=1e-15)
    assert rec.rows[1][1] == pytest.approx(0.25 * 5 / 24, rel=1e-15)
    assert rec.metadata["total_mass"] == pytest.approx(math.log(2 * math.log(2)), rel=1e-15)


def test_levy_Z_selection_a(capsys):
    rec = record_of(["levy", "--process", "Z", "--alpha", "0.5", "--selection", "A", "--n-max", "400"], capsys)
    assert rec.rows[-1][2] == pytest.approx(math.log(2), abs=1e-8)
    x = record_of(["levy", "--process", "X", "--alpha", "0.5", "--n-max", "3"], capsys)
    assert rec.rows[0][1] < x.rows[0][1]


def test_bernstein(capsys):
    rec = record_of(["bernstein", "--alpha", "0.5", "--selection", "A", "--lambda-grid", "0,1,20,inf"], capsys)
    assert rec.columns == ["lambda", "psi_L", "psi_X", "psi_Y", "psi_Z"]
    assert rec.rows[0][1:] == [0.0, 0.0, 0.0, 0.0]
    assert rec.metadata["psi_X_infinity"] == pytest.approx(math.log(2), rel=1e-15)
    # at lambda = 20 every curve sits at its value at infinity
    for col in ("L", "X", "Y", "Z"):
        value = rec.rows[2][rec.columns.index(f"psi_{col}")]
        assert value == pytest.approx(rec.metadata[f"psi_{col}_infinity"], rel=1e-8)
    assert rec.rows[3][1] == pytest.approx(rec.metadata["psi_L_infinity"])


def test_bernstein_rejects_negative_lambda(capsys):
    code, _, err = run(["bernstein", "--alpha", "0.5", "--selection", "A", "--lambda-grid=-1,2"], capsys)
    assert code == EXIT_DOMAIN
    assert err


def test_bernstein_needs_subordinator_parameters(capsys):
    code, _, _ = run(["bernstein", "--alpha", "0.5", "--processes", "LY"], capsys)
    assert code == EXIT_DOMAIN
    rec = record_of(["bernstein", "--alpha", "0.5", "--processes", "LX"], capsys)
    assert rec.columns == ["lambda", "psi_L", "psi_X"]


@pytest.mark.parametrize("figure", [1, 2, 3])
def test_figures(figure, capsys):
    rec = record_of(["figures", "--figure", str(figure)], capsys)
    assert rec.parameters["alphas"] == [0.5, 2 / 3]
    assert figure_checks_pass(rec)


def test_figure_1_orderings():
    rec = figure_record(1, [0.5, 2 / 3])
    for alpha in (0.5, 2 / 3):
        rows = [r for r in rec.rows if r[0] == alpha]
        assert rows[0][3] < rows[0][2]
        # the ratio of Z to X atoms is increasing in n, so the curves cross once
        ratios = [r[3] / r[2] for r in rows]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        entry = rec.metadata[f"alpha={alpha!r}"]
        assert abs(entry["truncated_mass_X"] - entry["A"]) < 1e-6
        assert abs(entry["truncated_mass_Z"] - entry["A"]) < 1e-6


def test_figure_metadata_flags_exist():
    rec2 = figure_record(2, [0.5])
    assert rec2.metadata["alpha=0.5"]["theta_L_equals_theta_Y"] is True
    rec3 = figure_record(3, [2 / 3])
    assert rec3.metadata[f"alpha={2 / 3!r}"]["infinity_chain_Y_L_Z_X"] is True


def test_simulate(capsys):
    rec = record_of(["simulate", "--process", "L", "--alpha", "0.5", "--samples", "200000", "--seed", "4"],
                    capsys)
    assert rec.columns == ["n", "count", "empirical", "analytic", "deviation"]
    assert rec.metadata["total_variation"] < 0.01
    assert sum(r[1] for r in rec.rows) == 200000
    assert rec.parameters["seed"] == 4


@pytest.mark.parametrize("construction", ["compound_poisson", "subordination"])
def test_simulate_Y_both_constructions(construction, capsys):
    rec = record_of(["simulate", "--process", "Y", "--construction", construction, "--alpha", "0.5",
                     "--selection", "A", "--samples", "300000"], capsys)
    assert rec.metadata["total_variation"] < 0.01


def test_simulate_is_byte_deterministic(capsys):
    argv = ["simulate", "--process", "Z", "--construction", "subordination", "--alpha", "0.5",
            "--selection", "A", "--samples", "50000", "--seed", "9", "--format", "json"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv + ["--workers", "3", "--chunk-size", "8000"], capsys)
    _, third, _ = run(argv, capsys)
    assert first == third
    # different chunking changes the streams but never the format
    assert json.loads(second)["columns"] == json.loads(first)["columns"]


def test_verify_small(capsys):
    rec = record_of(["verify", "--max-n", "5"], capsys)
    assert rec.metadata["failures"] == 0
    assert all(r[1] == "pass" for r in rec.rows)


def test_verify_failure_exit_code(capsys, monkeypatch):
    import loglevy.cli as cli
    from loglevy.verify import IdentityReport

    monkeypatch.setattr(cli, "run_full_suite",
                        lambda config: [IdentityReport("broken", "fail", "g", 1.0, 0.0, "r")])
    code, out, _ = run(["verify"], capsys)
    assert code == EXIT_VERIFY
    assert read_record(out).rows[0][1] == "fail"


# --- exit codes and I/O -----------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["pmf", "--process", "L", "--alpha", "0.5", "--t", "1", "--bogus"],
    ["simulate", "--process", "L", "--alpha", "0.5", "--samples", "0"],
    ["frobnicate"],
    ["pmf", "--process", "W", "--alpha", "0.5", "--t", "1"],
    ["verify", "--max-n", "0"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["pmf", "--process", "L", "--alpha", "1.5", "--t", "1"],
    ["pmf", "--process", "L", "--alpha", "0.5", "--t", "-1"],
    ["pmf", "--process", "Y", "--alpha", "0.5", "--t", "1"],
    ["pmf", "--process", "Z", "--alpha", "0.5", "--b", "-2", "--t", "1"],
    ["pmf", "--process", "Y", "--alpha", "0.5", "--selection", "A", "--beta", "1", "--t", "1"],
    ["simulate", "--process", "L", "--construction", "subordination", "--alpha", "0.5"],
])
def test_domain_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_DOMAIN
    assert out == "" and err


def test_cross_check_exit_code(capsys, monkeypatch):
    import loglevy.cli as cli
    from loglevy.transition import CrossCheckError

    def boom(*a, **k):
        raise CrossCheckError("forms disagree")

    monkeypatch.setattr(cli, "cross_checked_table", boom)
    code, out, err = run(["pmf", "--process", "L", "--alpha", "0.5", "--t", "1"], capsys)
    assert code == EXIT_CROSS_CHECK
    assert out == "" and "cross-check" in err


def test_output_file_and_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "out"))
    code, out, _ = run(["levy", "--process", "X", "--alpha", "0.5", "--n-max", "4", "--output", "x.csv"], capsys)
    assert code == EXIT_OK and out == ""
    written = (tmp_path / "out" / "x.csv").read_bytes().decode()
    assert read_record(written).rows[0][1] == 0.5
    absolute = tmp_path / "abs.json"
    run(["levy", "--process", "X", "--alpha", "0.5", "--n-max", "4", "--format", "json",
         "--output", str(absolute)], capsys)
    assert absolute.exists()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_pmf_output_round_trips_and_is_deterministic(fmt, capsys):
    argv = ["pmf", "--process", "Y", "--alpha", "0.6", "--selection", "B", "--t", "0.7", "--n-max", "30",
            "--format", fmt]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b
    rec = read_record(a)
    assert serialize(rec, fmt) == a
    p = selection_a(0.6)
    assert rec.parameters["alpha"] == 0.6 and rec.parameters["beta"] != p.beta


def test_module_entry_point():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "loglevy", "pmf", "--process", "X", "--alpha", "0.5",
                           "--t", "1", "--n-max", "3", "--format", "json"],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["rows"][0][1] == pytest.approx(0.5)
    bad = subprocess.run([sys.executable, "-m", "loglevy", "pmf", "--nope"], capture_output=True, text=True)
    assert bad.returncode == EXIT_USAGE
