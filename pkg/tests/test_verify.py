import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loglevy.charfun import ParameterDomainError, ProcessParams, levy_measure, selection_a
from loglevy.combinatorics import CoefficientSequence, c_sequence
from loglevy.transition import pmf_Y_stirling
from loglevy.verify import (
    IdentityReport,
    SuiteConfig,
    check_combinatorics_identity,
    check_harmonic_relations,
    check_remark3_inequalities,
    check_selection_inequalities,
    check_shifted_measure,
    check_steutel_recurrence,
    check_vague_limits,
    check_worked_values,
    combinatorics_identity_sides,
    failures,
    quadrature_levy_Y,
    quadrature_pmf_Y,
    remark_series_coefficients,
    run_full_suite,
    suite_checks,
)


def corrupted_c():
    c = c_sequence()
    return CoefficientSequence("c-corrupted", lambda k: c(k) + (Fraction(1, 1000) if k == 2 else 0))


# --- reports ------------------------------------------------------------------


def test_report_status_must_match_error():
    IdentityReport("x", "pass", "g", "exact", 0.0, "r")
    IdentityReport("x", "pass", "g", 1e-13, 1e-12, "r")
    IdentityReport("x", "fail", "g", 1e-11, 1e-12, "r")
    with pytest.raises(ValueError):
        IdentityReport("x", "pass", "g", 1e-11, 1e-12, "r")
    with pytest.raises(ValueError):
        IdentityReport("x", "fail", "g", "exact", 0.0, "r")
    with pytest.raises(ValueError):
        IdentityReport("x", "pass", "g", 1e-300, 0.0, "r")
    with pytest.raises(ValueError):
        IdentityReport("x", "maybe", "g", "exact", 0.0, "r")


def test_report_as_dict_keys():
    d = check_steutel_recurrence(5).as_dict()
    assert set(d) == {"identity_id", "status", "parameter_grid", "max_error", "tolerance", "reference"}
    assert d["status"] == "pass" and d["max_error"] == "exact" and d["tolerance"] == 0.0


# --- single checks -----------------------------------------------------------


def test_combinatorics_identity_examples():
    lhs, rhs = combinatorics_identity_sides(1, 1)
    assert lhs == rhs == Fraction(1, 2)
    assert check_combinatorics_identity(1, 1).passed
    assert check_combinatorics_identity(2, 3).passed
    r = check_combinatorics_identity(2, 3, corrupted_c())
    assert not r.passed and r.max_error > 0
    with pytest.raises(ValueError):
        check_combinatorics_identity(0, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12))
def test_combinatorics_identity_grid(m, n):
    assert check_combinatorics_identity(m, n).max_error == "exact"


def test_steutel_recurrence():
    for n in (0, 5, 30):
        assert check_steutel_recurrence(n).passed


def test_harmonic_relations():
    assert check_harmonic_relations(12).passed


def test_vague_limits():
    r = check_vague_limits(30)
    assert r.passed and r.max_error == "exact"
    assert check_vague_limits(10, r=Fraction(3, 7)).passed


def test_shifted_measure():
    assert check_shifted_measure(100).passed


def test_worked_values():
    assert check_worked_values().passed


@pytest.mark.parametrize("selection", ["A", "B"])
@pytest.mark.parametrize("alpha", [0.5, 2 / 3])
def test_selection_inequalities(selection, alpha):
    r = check_selection_inequalities(selection, alpha)
    assert r.passed, r
    assert r.tolerance == 1e-12


def test_selection_bad_inputs():
    with pytest.raises(ValueError):
        check_selection_inequalities("C", 0.5)
    with pytest.raises(ParameterDomainError):
        check_selection_inequalities("A", 1.5)


@pytest.mark.parametrize("alpha", [0.5, 2 / 3])
def test_remark3(alpha):
    assert check_remark3_inequalities(alpha).passed


@settings(max_examples=40)
@given(st.floats(0.01, 0.99))
def test_remark3_inequalities_over_alpha(alpha):
    A = -math.log1p(-alpha)
    assert A - alpha < A * alpha < 2 * (A - alpha)
    assert A * A < alpha * alpha / (1 - alpha)


def test_remark_series_leading_terms():
    coeffs = remark_series_coefficients(6)
    assert coeffs[:7] == [0, 0, 1, 1, Fraction(11, 12), Fraction(5, 6), Fraction(137, 180)]
    s = math.fsum(float(c) * 0.5**n for n, c in enumerate(remark_series_coefficients(60)))
    assert s == pytest.approx(math.log(2) ** 2, abs=1e-10)


# --- quadrature ---------------------------------------------------------------


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_quadrature_pmf_Y(t):
    p = selection_a(0.5)
    for n in range(0, 9):
        assert quadrature_pmf_Y(p, t, n) == pytest.approx(pmf_Y_stirling(p, t, n), rel=1e-8)


def test_quadrature_levy_Y():
    p = selection_a(2 / 3)
    m = levy_measure("Y", p)
    for n in range(1, 9):
        assert quadrature_levy_Y(p, n) == pytest.approx(m.atom(n), rel=1e-8)


def test_quadrature_needs_beta():
    with pytest.raises(ParameterDomainError):
        quadrature_pmf_Y(ProcessParams(0.5), 1.0, 2)


# --- suite --------------------------------------------------------------------


def test_full_suite_passes():
    reports = run_full_suite()
    assert reports
    assert failures(reports) == [], [r.as_dict() for r in failures(reports)]
    ids = {r.identity_id for r in reports}
    assert {"combinatorics_identity", "steutel_recurrence", "shifted_measure", "worked_values"} <= ids


def test_suite_is_deterministic():
    cfg = SuiteConfig().capped(5)
    assert run_full_suite(cfg) == run_full_suite(cfg)


def test_empty_grid_gives_empty_report():
    assert run_full_suite(SuiteConfig.empty()) == []
    assert suite_checks(SuiteConfig.empty()) == []


def test_corrupted_sequence_is_caught():
    cfg = SuiteConfig(c_override=corrupted_c()).capped(6)
    bad = {r.identity_id for r in failures(run_full_suite(cfg))}
    assert "combinatorics_identity" in bad


def test_capped_suite_passes():
    assert failures(run_full_suite(SuiteConfig().capped(5))) == []
