import math
import threading
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loglevy.combinatorics import (
    CoefficientSequence,
    as_rational,
    bell_matrix,
    bell_partial,
    bell_partial_bruteforce,
    bell_scale_identity_check,
    c_sequence,
    factorial,
    falling_factorial,
    g_sequence,
    h_sequence,
    harmonic,
    log_stirling1_row,
    rising_factorial,
    scaled_sequence,
    shifted_factorial_sequence,
    stirling1_signed,
    stirling1_unsigned,
    w_sequence,
    y_sequence,
)
from oracles import sympy_bell_partial, sympy_stirling_unsigned

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=30)
small_n = st.integers(min_value=0, max_value=12)


def make_sequence(values):
    return CoefficientSequence("test", lambda k: values[k - 1])


# --- factorials -------------------------------------------------------------


def test_factorial_values():
    assert factorial(0) == 1
    assert factorial(5) == 120
    acc = 1
    for j in range(1, 21):
        acc *= j
    assert factorial(20) == acc == 2432902008176640000


def test_rising_factorial_examples():
    assert rising_factorial(1, 4) == 24
    assert rising_factorial(Fraction(1, 2), 2) == Fraction(3, 4)
    assert rising_factorial(Fraction(7, 3), 0) == 1


def test_falling_factorial_examples():
    t = Fraction(13, 7)
    assert falling_factorial(t, 1) == t
    assert falling_factorial(3, 3) == 6
    assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)


def test_rising_factorial_cubic_has_stirling_coefficients():
    # t(t+1)(t+2) = 2t + 3t^2 + t^3
    assert [stirling1_unsigned(3, k) for k in range(4)] == [0, 2, 3, 1]
    for t in (Fraction(1, 3), Fraction(-5, 2), Fraction(4)):
        assert rising_factorial(t, 3) == 2 * t + 3 * t**2 + t**3


@given(rationals, small_n)
def test_falling_is_signed_rising(x, n):
    assert falling_factorial(x, n) == (-1) ** n * rising_factorial(-x, n)


@given(rationals, small_n)
def test_factorials_expand_in_stirling_numbers(x, n):
    assert rising_factorial(x, n) == sum(stirling1_unsigned(n, k) * x**k for k in range(n + 1))
    assert falling_factorial(x, n) == sum(stirling1_signed(n, k) * x**k for k in range(n + 1))


def test_as_rational_is_exact_for_floats():
    assert as_rational(0.1) == Fraction(3602879701896397, 36028797018963968)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(ValueError):
        as_rational(float("inf"))


# --- Stirling numbers ---------------------------------------------------------


def test_stirling_examples():
    assert stirling1_unsigned(3, 2) == 3
    assert stirling1_unsigned(4, 2) == 11 == math.factorial(3) * harmonic(3)
    assert stirling1_signed(3, 2) == -3
    assert stirling1_signed(2, 1) == -1
    for n in range(10):
        assert stirling1_unsigned(n, n) == 1 == stirling1_signed(n, n)


def test_stirling_boundaries_and_errors():
    assert stirling1_unsigned(0, 0) == 1
    assert all(stirling1_unsigned(n, 0) == 0 for n in range(1, 10))
    with pytest.raises(ValueError):
        stirling1_unsigned(3, 4)
    with pytest.raises(ValueError):
        stirling1_signed(2, 3)
    with pytest.raises(ValueError):
        stirling1_unsigned(-1, 0)


@given(st.integers(1, 40), st.data())
def test_stirling_recurrence(n, data):
    k = data.draw(st.integers(1, n))
    assert stirling1_unsigned(n + 1, k) == stirling1_unsigned(n, k - 1) + n * stirling1_unsigned(n, k)


def test_stirling_matches_sympy():
    for n in range(0, 15):
        for k in range(0, n + 1):
            assert stirling1_unsigned(n, k) == sympy_stirling_unsigned(n, k)


def test_stirling_is_bell_over_shifted_factorials():
    seq = shifted_factorial_sequence()
    for n in range(0, 13):
        for k in range(0, n + 1):
            assert bell_partial(seq, n, k) == stirling1_unsigned(n, k)


def test_signed_stirling_is_bell_over_h():
    h = h_sequence()
    for n in range(0, 13):
        for k in range(0, n + 1):
            assert bell_partial(h, n, k) == stirling1_signed(n, k)


def test_stirling_harmonic_relations():
    for n in range(0, 13):
        assert stirling1_unsigned(n + 2, 2) == math.factorial(n + 1) * harmonic(n + 1)
    for n in range(4, 13):
        h1, h2, h3 = harmonic(n - 1), harmonic(n - 1, 2), harmonic(n - 1, 3)
        f = math.factorial(n - 1)
        assert stirling1_unsigned(n, 3) == Fraction(f, 2) * (h1**2 - h2)
        assert stirling1_unsigned(n, 4) == Fraction(f, 6) * (h1**3 - 3 * h1 * h2 + 2 * h3)


def test_log_stirling_row_matches_exact():
    for n in (1, 5, 30, 120):
        row = log_stirling1_row(n)
        for k in range(n + 1):
            v = stirling1_unsigned(n, k)
            if v == 0:
                assert row[k] == -np.inf
            else:
                assert row[k] == pytest.approx(math.log(v) - math.lgamma(n + 1), rel=1e-13, abs=1e-12)


# --- partial Bell polynomials -----------------------------------------------


def test_bell_examples_on_c():
    c = c_sequence()
    assert bell_partial(c, 3, 1) == Fraction(3, 2)
    assert bell_partial(c, 3, 2) == 1
    assert bell_partial(c, 3, 3) == Fraction(1, 8)
    assert [bell_partial(c, 4, k) for k in range(1, 5)] == [Fraction(24, 5), Fraction(13, 3), 1,
                                                             Fraction(1, 16)]
    assert bell_partial(c, 2, 1) == Fraction(2, 3)
    assert bell_partial(c, 2, 2) == Fraction(1, 4)


def test_bell_boundaries():
    c = c_sequence()
    assert bell_partial(c, 0, 0) == 1
    assert bell_partial(c, 5, 0) == 0
    assert bell_partial(c, 0, 3) == 0
    assert bell_partial(c, 3, 4) == 0  # k > n gives 0 rather than an error


@given(st.lists(rationals, min_size=8, max_size=8), st.integers(1, 8))
def test_bell_first_column_is_sequence(values, n):
    seq = make_sequence(values)
    assert bell_partial(seq, n, 1) == values[n - 1]
    assert bell_partial(seq, n, n) == values[0] ** n


@settings(max_examples=40)
@given(st.lists(rationals, min_size=7, max_size=7), st.integers(1, 7), st.data())
def test_bell_recurrence_matches_partition_sum(values, n, data):
    k = data.draw(st.integers(1, n))
    seq = make_sequence(values)
    assert bell_partial(seq, n, k) == bell_partial_bruteforce(seq, n, k)


def test_bell_matches_sympy():
    c = c_sequence()
    values = c.terms(8)
    for n in range(1, 9):
        for k in range(1, n + 1):
            assert bell_partial(c, n, k) == sympy_bell_partial(n, k, values)


@settings(max_examples=30)
@given(rationals.filter(bool), rationals.filter(bool), st.integers(1, 8), st.data())
def test_bell_scaling_identity(a, b, n, data):
    k = data.draw(st.integers(1, n))
    for seq in (c_sequence(), y_sequence()):
        assert bell_scale_identity_check(a, b, seq, n, k)
        scaled = scaled_sequence(seq, a, b)
        assert bell_partial(scaled, n, k) == a**n * b**k * bell_partial(seq, n, k)


def test_bell_scaling_examples():
    c = c_sequence()
    assert bell_scale_identity_check(2, 3, c, 4, 2)
    assert bell_scale_identity_check(1, 1, y_sequence(), 6, 3)
    assert bell_scale_identity_check(Fraction(1, 3), -2, c, 5, 3)


def test_matrix_composition():
    # Bell matrix of log(1 + G) is the product of those of G and log(1 + s)
    y = y_sequence()
    h = h_sequence()
    for alpha in (Fraction(1), Fraction(1, 2), Fraction(2, 3)):
        g = g_sequence(alpha)
        x = CoefficientSequence("x", lambda n, a=alpha: a**n * y(n))
        for n in range(1, 11):
            for k in range(1, n + 1):
                rhs = sum(bell_partial(g, n, j) * bell_partial(h, j, k) for j in range(k, n + 1))
                assert bell_partial(x, n, k) == rhs


def test_bell_matrix_float_matches_exact():
    c = c_sequence()
    n_max = 40
    x_tilde = np.zeros(n_max + 1)
    x_tilde[1:] = [float(c(j) / math.factorial(j)) for j in range(1, n_max + 1)]
    m = bell_matrix(x_tilde, n_max)
    for n in (1, 7, 20, 40):
        for k in range(1, n + 1):
            exact = float(bell_partial(c, n, k) / math.factorial(n))
            assert m[n, k] == pytest.approx(exact, rel=1e-12)


# --- sequences ----------------------------------------------------------------


def test_sequences_start_at_one():
    for seq in (c_sequence(), h_sequence(), y_sequence()):
        with pytest.raises(ValueError):
            seq(0)
    with pytest.raises(TypeError):
        c_sequence()(1.0)


def test_known_sequence_terms():
    assert c_sequence().terms(4) == [Fraction(1, 2), Fraction(2, 3), Fraction(3, 2), Fraction(24, 5)]
    assert h_sequence().terms(4) == [1, -1, 2, -6]
    assert y_sequence().terms(5) == [Fraction(1, 2), Fraction(5, 12), Fraction(3, 4),
                                     Fraction(251, 120), Fraction(95, 12)]
    r = Fraction(1, 3)
    w = w_sequence(r)
    assert w(1) == r
    assert w(2) == r + r**2  # |s(2,1)| 0! r + |s(2,2)| 1! r^2


def test_harmonic_examples():
    assert harmonic(3) == Fraction(11, 6)
    assert all(harmonic(1, k) == 1 for k in range(1, 6))
    assert harmonic(3, 2) == Fraction(49, 36)


def test_bell_rows_are_thread_safe():
    seq = CoefficientSequence("fresh-c", lambda k: Fraction(math.factorial(k), k + 1))
    results = []

    def work():
        results.append(seq.bell_row(25))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(r == results[0] for r in results)
    assert results[0] == c_sequence().bell_row(25)
