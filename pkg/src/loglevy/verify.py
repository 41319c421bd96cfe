"""Executable catalog of the identities, limits and inequalities behind the
package, each producing an :class:`IdentityReport`.

Exact identities are compared as rationals with zero tolerance; transcendental
factors such as ``alpha^n`` or ``(alpha/A)^t`` are stripped by comparing
coefficients.  Numerical checks carry their own tolerance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

import numpy as np
from scipy import integrate

from .charfun import (
    ProcessParams,
    bernstein,
    levy_coefficient_L,
    levy_coefficient_X,
    levy_coefficient_Y,
    levy_coefficient_Z,
    levy_measure,
    log_series_G,
    selection_a,
    selection_b,
)
from .combinatorics import (
    CoefficientSequence,
    as_rational,
    bell_partial,
    bell_partial_bruteforce,
    bell_scale_identity_check,
    c_sequence,
    falling_factorial,
    g_sequence,
    h_sequence,
    harmonic,
    rising_factorial,
    shifted_factorial_sequence,
    stirling1_signed,
    stirling1_unsigned,
    y_sequence,
)
from .transition import (
    L_falling_polynomial,
    L_powers_polynomial,
    Lm_coefficient_bell,
    Lm_coefficient_stirling,
    Y_bell_polynomial,
    Y_stirling_polynomial,
    Z_bell_polynomial,
    Z_series_coefficient,
    convolve,
    pmf_L_t_falling,
    pmf_L_t_powers,
    pmf_X,
    pmf_Y_bell,
    pmf_Y_stirling,
    pmf_Z_bell,
    pmf_Z_series,
    pmf_table,
)

ErrorValue = Union[str, float]


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one check.

    ``max_error`` is ``"exact"`` when an exact identity holds; otherwise the
    largest discrepancy found (for a failed exact identity, the largest
    absolute difference as a float).  ``tolerance`` is 0 for exact identities.
    """

    identity_id: str
    status: str
    parameter_grid: str
    max_error: ErrorValue
    tolerance: float
    reference: str

    def __post_init__(self) -> None:
        if self.status not in ("pass", "fail"):
            raise ValueError("status must be 'pass' or 'fail'")
        within = self.max_error == "exact" or (
            isinstance(self.max_error, float) and self.max_error <= self.tolerance
            and not (self.tolerance == 0.0 and self.max_error > 0.0)
        )
        if (self.status == "pass") != within:
            raise ValueError("status must be 'pass' exactly when max_error is within tolerance")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "status": self.status,
            "parameter_grid": self.parameter_grid,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "reference": self.reference,
        }


def _exact_report(identity_id: str, grid: str, reference: str,
                  pairs: Iterable[tuple[Fraction, Fraction]]) -> IdentityReport:
    worst = Fraction(0)
    for lhs, rhs in pairs:
        diff = abs(Fraction(lhs) - Fraction(rhs))
        if diff > worst:
            worst = diff
    if worst == 0:
        return IdentityReport(identity_id, "pass", grid, "exact", 0.0, reference)
    err = float(worst)
    return IdentityReport(identity_id, "fail", grid, err if err > 0 else 5e-324, 0.0, reference)


def _numeric_report(identity_id: str, grid: str, reference: str, errors: Iterable[float],
                    tolerance: float) -> IdentityReport:
    worst = 0.0
    for e in errors:
        e = float(e)
        if not math.isfinite(e):
            worst = math.inf
        elif e > worst:
            worst = e
    status = "pass" if worst <= tolerance else "fail"
    return IdentityReport(identity_id, status, grid, worst, tolerance, reference)


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


# ---------------------------------------------------------------------------
# Combinatorial identities


def combinatorics_identity_sides(m: int, n: int, seq: Optional[CoefficientSequence] = None):
    """``sum_{k<=m^n} B_{n,k}(c)/(m-k)!`` and ``|s(m+n,m)| n!/(m+n)!``."""
    seq = seq or c_sequence()
    lhs = sum((bell_partial(seq, n, k) / math.factorial(m - k) for k in range(1, min(m, n) + 1)),
              Fraction(0))
    rhs = Fraction(stirling1_unsigned(m + n, m) * math.factorial(n), math.factorial(m + n))
    return lhs, rhs


def check_combinatorics_identity(m: int, n: int, seq: Optional[CoefficientSequence] = None
                                 ) -> IdentityReport:
    """The Bell/Stirling identity linking the two forms of the m-fold
    convolution of ``L(1)``, at a single ``(m, n)``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    return _exact_report(
        "combinatorics_identity", f"m={m}, n={n}",
        "Bell sum over c equals the Stirling ratio for the m-fold convolution",
        [combinatorics_identity_sides(m, n, seq)],
    )


def check_combinatorics_grid(max_m: int, max_n: int, seq: Optional[CoefficientSequence] = None
                             ) -> IdentityReport:
    pairs = (combinatorics_identity_sides(m, n, seq)
             for m in range(1, max_m + 1) for n in range(1, max_n + 1))
    return _exact_report(
        "combinatorics_identity", f"1<=m<={max_m}, 1<=n<={max_n}",
        "Bell sum over c equals the Stirling ratio for the m-fold convolution", pairs,
    )


def check_convolution_forms(max_m: int, max_n: int, seq: Optional[CoefficientSequence] = None
                            ) -> IdentityReport:
    """Stirling and Bell coefficients of ``P(L(m) = n)`` agree."""
    seq = seq or c_sequence()

    def bell_form(m, n):
        return sum((Fraction(math.factorial(m), math.factorial(m - k)) * bell_partial(seq, n, k)
                    for k in range(0, min(m, n) + 1)), Fraction(0))

    pairs = ((Lm_coefficient_stirling(m, n), bell_form(m, n))
             for m in range(1, max_m + 1) for n in range(0, max_n + 1))
    return _exact_report(
        "convolution_dual_forms", f"1<=m<={max_m}, 0<=n<={max_n}",
        "m-fold convolution of L(1): Stirling form vs partial Bell form", pairs,
    )


def check_steutel_recurrence(n_max: int) -> IdentityReport:
    """``(n+1)/(n+2) = sum_k y_{n-k+1} / ((k+1)(n-k)!)`` for ``n <= n_max``,
    the coefficient form of ``(n+1) p_{n+1} = sum_k p_k (n-k+1) Pi_L(n-k+1)``."""
    y = y_sequence()

    def pair(n):
        rhs = sum((y(n - k + 1) / ((k + 1) * math.factorial(n - k)) for k in range(n + 1)),
                  Fraction(0))
        return Fraction(n + 1, n + 2), rhs

    return _exact_report(
        "steutel_recurrence", f"0<=n<={n_max}",
        "recurrence between the law of L(1) and its canonical Levy measure",
        (pair(n) for n in range(0, n_max + 1)),
    )


def check_stirling_basics(n_max: int, seed: int = 2024) -> IdentityReport:
    """Stirling recurrence, the Bell definition over ``(j-1)!``, the signed
    Bell triangle over ``h``, and factorial-to-power expansions at random
    rationals."""
    rnd = random.Random(seed)
    pairs = []
    fact_seq, h = shifted_factorial_sequence(), h_sequence()
    for n in range(0, n_max + 1):
        for k in range(0, n + 1):
            if 0 < k <= n and n >= 1:
                pairs.append((stirling1_unsigned(n + 1, k),
                              stirling1_unsigned(n, k - 1) + n * stirling1_unsigned(n, k)))
            pairs.append((bell_partial(fact_seq, n, k), stirling1_unsigned(n, k)))
            pairs.append((bell_partial(h, n, k), stirling1_signed(n, k)))
        x = Fraction(rnd.randint(-50, 50), rnd.randint(1, 20))
        pairs.append((rising_factorial(x, n),
                      sum((stirling1_unsigned(n, k) * x**k for k in range(n + 1)), Fraction(0))))
        pairs.append((falling_factorial(x, n),
                      sum((stirling1_signed(n, k) * x**k for k in range(n + 1)), Fraction(0))))
    return _exact_report("stirling_expansions", f"0<=k<=n<={n_max}",
                         "Stirling numbers of the first kind: recurrence, Bell and power expansions",
                         pairs)


def check_harmonic_relations(n_max: int) -> IdentityReport:
    """``|s(n+2,2)| = (n+1)! H_{n+1}`` and the order-3 and order-4 harmonic
    formulas for ``|s(n,3)|`` and ``|s(n,4)|``."""
    pairs = []
    for n in range(0, n_max + 1):
        pairs.append((stirling1_unsigned(n + 2, 2), math.factorial(n + 1) * harmonic(n + 1)))
    for n in range(3, n_max + 1):
        h1, h2, h3 = harmonic(n - 1), harmonic(n - 1, 2), harmonic(n - 1, 3)
        f = math.factorial(n - 1)
        pairs.append((stirling1_unsigned(n, 3), Fraction(f, 2) * (h1**2 - h2)))
        s4 = stirling1_unsigned(n, 4) if n >= 4 else 0
        pairs.append((s4, Fraction(f, 6) * (h1**3 - 3 * h1 * h2 + 2 * h3)))
    return _exact_report("stirling_harmonic", f"n<={n_max}",
                         "Stirling numbers through generalized harmonic numbers", pairs)


def check_bell_scaling(n_max: int, trials: int = 4, seed: int = 7) -> IdentityReport:
    """``B_{n,k}(a^j b x_j) = a^n b^k B_{n,k}(x)`` for random rational
    ``a``, ``b`` and several sequences; also the brute-force partition sum."""
    rnd = random.Random(seed)
    ok = True
    sequences = [c_sequence(), y_sequence(), h_sequence()]
    for _ in range(trials):
        a = Fraction(rnd.randint(-9, 9) or 1, rnd.randint(1, 9))
        b = Fraction(rnd.randint(-9, 9) or 1, rnd.randint(1, 9))
        for seq in sequences:
            for n in range(1, n_max + 1):
                for k in range(1, n + 1):
                    ok &= bell_scale_identity_check(a, b, seq, n, k)
    pairs = [(Fraction(int(ok)), Fraction(1))]
    for seq in sequences:
        for n in range(1, min(n_max, 8) + 1):
            for k in range(1, n + 1):
                pairs.append((bell_partial(seq, n, k), bell_partial_bruteforce(seq, n, k)))
    return _exact_report("bell_scaling", f"n<={n_max}, {trials} random (a, b), sequences c, y, h",
                         "homogeneity of partial Bell polynomials", pairs)


def check_matrix_composition(n_max: int, alphas=(Fraction(1), Fraction(1, 2), Fraction(2, 3))
                             ) -> IdentityReport:
    """Bell matrix of ``log(1 + G(s))`` is the product of those of ``G`` and
    ``log(1 + s)``: ``B_{n,k}(x) = sum_j B_{n,j}(g) s(j,k)`` with
    ``x_n = alpha^n y_n``."""
    pairs = []
    h = h_sequence()
    y = y_sequence()
    for alpha in alphas:
        a = as_rational(alpha)
        g = g_sequence(a)
        x = CoefficientSequence(f"x[{a}]", lambda n, a=a: a**n * y(n))
        for n in range(1, n_max + 1):
            for k in range(1, n + 1):
                rhs = sum((bell_partial(g, n, j) * bell_partial(h, j, k) for j in range(k, n + 1)),
                          Fraction(0))
                pairs.append((bell_partial(x, n, k), rhs))
    return _exact_report("matrix_composition", f"1<=k<=n<={n_max}, alpha in {[str(a) for a in alphas]}",
                         "composition of exponential generating functions as a matrix product",
                         pairs)


def check_falling_powers_equivalence(n_max: int) -> IdentityReport:
    """Falling-factorial and power forms of ``P(L(t) = n)`` have equal
    coefficient polynomials in ``t``."""
    pairs = []
    for n in range(0, n_max + 1):
        for a, b in zip(L_falling_polynomial(n), L_powers_polynomial(n)):
            pairs.append((a, b))
    return _exact_report("L_falling_vs_powers_polynomial", f"0<=n<={n_max}",
                         "two forms of the transition probability of L", pairs)


def check_Y_forms_polynomial(n_max: int, rs=(Fraction(1, 3), Fraction(2, 5))) -> IdentityReport:
    pairs = []
    for r in rs:
        for n in range(0, n_max + 1):
            pairs.extend(zip(Y_stirling_polynomial(n, r), Y_bell_polynomial(n, r)))
    return _exact_report("Y_stirling_vs_bell_polynomial", f"0<=n<={n_max}, r in {[str(r) for r in rs]}",
                         "two forms of the transition probability of Y", pairs)


def check_Z_series_coefficients(n_max: int, k_max: int) -> IdentityReport:
    """Coefficient of ``x^k`` in ``e^x sum_j x^j B_{n,j}(c)`` equals
    ``|s(k+n,k)| n!/(n+k)!``, so the Poisson series with ``e^{-bt}`` equals
    the closed form with ``e^{-theta t}`` for every ``n``."""
    pairs = []
    for n in range(0, n_max + 1):
        poly = Z_bell_polynomial(n)
        for k in range(0, k_max + 1):
            lhs = sum((poly[j] / math.factorial(k - j) for j in range(0, min(k, n) + 1)),
                      Fraction(0))
            pairs.append((lhs, Z_series_coefficient(n, k)))
    return _exact_report("Z_series_equivalence", f"0<=n<={n_max}, 0<=k<={k_max}",
                         "Poisson-subordination series against the closed form of Z", pairs)


def check_vague_limits(n_max: int = 30, r=None) -> IdentityReport:
    """The ``t^1`` coefficient of each power-form transition probability is
    the Lévy measure: ``Pi(n) = lim_{t->0} P(t, n)/t``."""
    r = as_rational(selection_a(0.5).r if r is None else r)
    pairs = []
    for n in range(1, n_max + 1):
        nf = math.factorial(n)
        # L: powers form and the independent falling form
        pairs.append((L_powers_polynomial(n)[1] / nf, levy_coefficient_L(n)))
        pairs.append((L_falling_polynomial(n)[1] / nf, levy_coefficient_L(n)))
        # Y: Bell form and Stirling form
        pairs.append((Y_bell_polynomial(n, r)[1] / nf, levy_coefficient_Y(n, r)))
        pairs.append((Y_stirling_polynomial(n, r)[1] / nf, levy_coefficient_Y(n, r)))
        # Z: coefficient of x = alpha b t / A, with b alpha^(n+1)/A stripped
        pairs.append((Z_bell_polynomial(n)[1] / nf, levy_coefficient_Z(n)))
    return _exact_report("vague_limits", f"processes L, Y, Z; 1<=n<={n_max}; r={r}",
                         "Levy measure as the small-time limit of P(t, n)/t", pairs)


def check_shifted_measure(n_max: int = 100) -> IdentityReport:
    """``Pi_Z(n) A / b = Pi_X(n+1)``, compared on coefficients of ``alpha^(n+1)``."""
    return _exact_report("shifted_measure", f"1<=n<={n_max}",
                         "Levy measure of Z is a shifted Levy measure of X",
                         ((levy_coefficient_Z(n), levy_coefficient_X(n + 1))
                          for n in range(1, n_max + 1)))


def _falling_poly(coeffs_by_k: dict[int, Fraction]) -> list[Fraction]:
    """``sum_k a_k [t]_{k,falling}`` as a polynomial in ``t``."""
    deg = max(coeffs_by_k, default=0)
    out = [Fraction(0)] * (deg + 1)
    for k, a in coeffs_by_k.items():
        for j in range(k + 1):
            out[j] += a * stirling1_signed(k, j)
    return out


def _pad(p, n):
    return list(p) + [Fraction(0)] * (n - len(p))


def check_worked_values() -> IdentityReport:
    """Displayed values: the first five atoms of ``Pi_L``, the first four
    transition polynomials of ``L``, ``P(Z(t)=0..3)`` and the two Poisson
    series reductions for ``P(Z(t)=1)`` and ``P(Z(t)=2)``."""
    F = Fraction
    pairs = []
    # Pi_L(n) = alpha^n/n! y_n
    for n, v in zip(range(1, 6), [F(1, 2), F(5, 12), F(3, 4), F(251, 120), F(95, 12)]):
        pairs.append((levy_coefficient_L(n) * math.factorial(n), v))
    # P(L(t)=n) = (alpha/A)^t alpha^n/n! * polynomial in t
    expected_L = {
        1: _falling_poly({1: F(1, 2)}),
        2: _falling_poly({1: F(2, 3), 2: F(1, 4)}),
        3: _falling_poly({1: F(6, 4), 2: F(3 * 2, 2 * 3), 3: F(1, 8)}),
        4: _falling_poly({1: F(24, 5), 2: F(13, 3), 3: F(1), 4: F(1, 16)}),
    }
    for n, poly in expected_L.items():
        for got in (L_falling_polynomial(n), L_powers_polynomial(n)):
            pairs.extend(zip(_pad(got, n + 1), _pad(poly, n + 1)))
    # P(Z(t)=n) = e^{-theta t} alpha^n/n! * polynomial in x = alpha b t/A
    expected_Z = {0: [F(1)], 1: [F(0), F(1, 2)], 2: [F(0), F(2, 3), F(1, 4)],
                  3: [F(0), F(6, 4), F(1), F(1, 8)]}
    for n, poly in expected_Z.items():
        pairs.extend(zip(Z_bell_polynomial(n), poly))
    # Poisson series coefficients and their splitting into shifted exponentials
    for k in range(1, 41):
        pairs.append((Z_series_coefficient(1, k), F(1, 2 * math.factorial(k - 1))))
        two = F(3 * k + 5, 4) * F(2, math.factorial(k - 1) * 6)
        pairs.append((Z_series_coefficient(2, k), two))
        split2 = F(2, 3 * math.factorial(k - 1)) + (F(1, 4 * math.factorial(k - 2)) if k >= 2 else 0)
        pairs.append((two, split2))
        three = F((k + 3) * (k + 2), 8 * math.factorial(k - 1))
        pairs.append((Z_series_coefficient(3, k), three))
        if k >= 3:
            split3 = (F(1, 8 * math.factorial(k - 3)) + F(1, math.factorial(k - 2))
                      + F(6, 4 * math.factorial(k - 1)))
            pairs.append((three, split3))
    # Stirling values quoted alongside
    pairs += [(stirling1_unsigned(3, 2), 3), (stirling1_unsigned(3, 1), 2), (stirling1_unsigned(3, 0), 0)]
    return _exact_report("worked_values", "n<=5 atoms, n<=4 for L(t), n<=3 for Z(t), k<=40 series",
                         "displayed atoms and low-order transition probabilities", pairs)


# ---------------------------------------------------------------------------
# Parameter selections and inequalities


def check_selection_inequalities(selection: str, alpha: float) -> IdentityReport:
    """Selection A: equal total masses and the strict chain of means.
    Selection B: equal means and the strict chain of total masses."""
    if selection not in ("A", "B"):
        raise ValueError("selection must be 'A' or 'B'")
    params = selection_a(alpha) if selection == "A" else selection_b(alpha)
    A = params.A
    psi = {p: bernstein(p, params) for p in "LXYZ"}
    errors = []
    if selection == "A":
        d = [psi[p].derivative_at_zero for p in "LYXZ"]
        chain = d[0] < d[1] < d[2] < d[3]
        explicit = [alpha / (A * (1 - alpha)) - 1, (A - alpha) / (A * (1 - alpha)),
                    alpha / (1 - alpha), A / (A - alpha) * (alpha / (1 - alpha) - A)]
        errors += [_relative(a, b) for a, b in zip(d, explicit)]
        errors += [abs(psi["L"].value_at_infinity - psi["Y"].value_at_infinity),
                   abs(psi["X"].value_at_infinity - psi["Z"].value_at_infinity),
                   abs(psi["L"].value_at_infinity - math.log(A / alpha)),
                   abs(psi["X"].value_at_infinity - A)]
        grid = f"selection A, alpha={alpha!r}: psi'_L(0) < psi'_Y(0) < psi'_X(0) < psi'_Z(0)"
    else:
        v = [psi[p].value_at_infinity for p in "YLZX"]
        chain = v[0] < v[1] < v[2] < v[3]
        explicit = [math.log(2 - A * (1 - alpha) / alpha), math.log(A / alpha),
                    alpha * (A - alpha) / (A * alpha - A + alpha), A]
        errors += [_relative(a, b) for a, b in zip(v, explicit)]
        errors += [abs(psi["L"].derivative_at_zero - psi["Y"].derivative_at_zero),
                   abs(psi["Z"].derivative_at_zero - psi["X"].derivative_at_zero)]
        grid = f"selection B, alpha={alpha!r}: psi_Y(inf) < psi_L(inf) < psi_Z(inf) < psi_X(inf)"
    if not chain:
        errors.append(math.inf)
    return _numeric_report(f"selection_{selection}", grid,
                           "parameter couplings equalizing masses or means", errors, 1e-12)


def remark_series_coefficients(n_max: int) -> list[Fraction]:
    """Coefficients of ``alpha^n`` (n = 0..n_max) in ``(-log(1-alpha))^2``,
    from ``2 |s(n,2)| / n!``."""
    return [Fraction(2 * stirling1_unsigned(n, 2), math.factorial(n)) if n >= 2 else Fraction(0)
            for n in range(n_max + 1)]


def check_remark3_inequalities(alpha: float, n_series: int = 60) -> IdentityReport:
    """``A - alpha < A alpha < 2(A - alpha)``, ``A^2 < alpha^2/(1-alpha)``,
    and the truncated series of ``A^2`` against ``(-log(1-alpha))^2``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    A = -math.log1p(-alpha)
    errors = []
    if not (A - alpha < A * alpha < 2 * (A - alpha)):
        errors.append(math.inf)
    if not A * A < alpha * alpha / (1 - alpha):
        errors.append(math.inf)
    coeffs = remark_series_coefficients(n_series)
    # the harmonic form of the same coefficients and the displayed leading terms
    for n in range(2, n_series + 1):
        if coeffs[n] != 2 * harmonic(n - 1) / n:
            errors.append(math.inf)
    leading = [Fraction(1), Fraction(1), Fraction(11, 12), Fraction(10, 12), Fraction(137, 180)]
    if coeffs[2:7] != leading:
        errors.append(math.inf)
    series = math.fsum(float(c) * alpha**n for n, c in enumerate(coeffs))
    errors.append(abs(series - A * A))
    return _numeric_report("remark3_inequalities", f"alpha={alpha!r}, series to n={n_series}",
                           "inequalities between A and alpha behind both selections",
                           errors, 1e-10)


# ---------------------------------------------------------------------------
# Numerical checks of the transition probabilities


def check_dual_formulas(alphas, times, n_max: int) -> IdentityReport:
    """Float agreement of the two forms for ``L`` and for ``Y`` at Selection A."""
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        for t in times:
            for n in range(0, n_max + 1):
                errors.append(_relative(pmf_L_t_falling(params, t, n), pmf_L_t_powers(params, t, n)))
                errors.append(_relative(pmf_Y_stirling(params, t, n), pmf_Y_bell(params, t, n)))
    return _numeric_report(
        "dual_formulas_float", f"alpha in {list(alphas)}, t in {list(times)}, n<={n_max}",
        "falling vs power form of L, Stirling vs Bell form of Y", errors, 1e-12,
    )


def check_Z_series_float(alphas, times, n_max: int) -> IdentityReport:
    """Closed form of ``P(Z(t) = n)`` against the truncated Poisson series."""
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        for t in times:
            for n in range(0, n_max + 1):
                series = pmf_Z_series(params, t, n)
                errors.append(_relative(pmf_Z_bell(params, t, n), series.value))
                errors.append(series.tail)
    return _numeric_report(
        "Z_series_float", f"alpha in {list(alphas)}, t in {list(times)}, n<={n_max}",
        "closed form of Z vs Poisson-subordination series (error and series tail)", errors, 1e-10,
    )


def quadrature_pmf_Y(params: ProcessParams, t: float, n: int) -> float:
    """``int P(X(u) = n) Gamma(t, beta)(du)`` with ``u = -beta log v``."""
    beta = params.require_beta()
    log_gamma_t = math.lgamma(t)

    def ground(v):
        u = -beta * math.log(v)
        return pmf_X(params, u, n) if u > 0 else (1.0 if n == 0 else 0.0)

    opts = dict(epsabs=0.0, epsrel=1e-12, limit=400)
    if t < 1.0:
        # (-log v)^(t-1) = (1-v)^(t-1) * ((-log v)/(1-v))^(t-1): algebraic weight at v = 1
        def f(v):
            ratio = -math.log(v) / (1.0 - v) if v < 1.0 else 1.0
            return ground(v) * math.exp((t - 1.0) * math.log(ratio) - log_gamma_t)

        val, _ = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(0.0, t - 1.0), **opts)
        return val

    def g(v):
        if v >= 1.0:
            return 0.0 if t > 1.0 or n > 0 else math.exp(-log_gamma_t)
        return ground(v) * math.exp((t - 1.0) * math.log(-math.log(v)) - log_gamma_t)

    val, _ = integrate.quad(g, 0.0, 1.0, **opts)
    return val


def quadrature_levy_Y(params: ProcessParams, n: int) -> float:
    """``int P(X(u) = n) e^{-u/beta} du/u`` with ``u = -beta log v``."""
    beta = params.require_beta()
    if n < 1:
        raise ValueError("n must be >= 1")

    def f(v):
        if v >= 1.0:
            # small u: P(X(u)=n)/u -> Pi_X(n) = alpha^n/n, and du/u matches dv/(-log v) * beta/beta
            return params.alpha**n / n * beta
        u = -beta * math.log(v)
        return pmf_X(params, u, n) / (-math.log(v))

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=400)
    return val


def check_integral_representation(alphas, times, n_max: int = 8) -> IdentityReport:
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        measure = levy_measure("Y", params)
        for t in times:
            for n in range(0, n_max + 1):
                errors.append(_relative(pmf_Y_stirling(params, t, n), quadrature_pmf_Y(params, t, n)))
        for n in range(1, n_max + 1):
            errors.append(_relative(measure.atom(n), quadrature_levy_Y(params, n)))
    return _numeric_report(
        "Y_integral_representation", f"alpha in {list(alphas)}, t in {list(times)}, n<={n_max}",
        "Y as the negative binomial process integrated against the Gamma law and Gamma Levy measure",
        errors, 1e-8,
    )


def check_small_time_limit_Y(alphas, n_max: int = 5, t: float = 1e-8) -> IdentityReport:
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        measure = levy_measure("Y", params)
        for n in range(1, n_max + 1):
            errors.append(_relative(pmf_Y_stirling(params, t, n) / t, measure.atom(n)))
    return _numeric_report("Y_small_time_limit", f"alpha in {list(alphas)}, t={t}, 1<=n<={n_max}",
                           "P(Y(t)=n)/t approaches Pi_Y(n)", errors, 1e-6)


def check_normalization(alphas, times, n_max: int = 400) -> IdentityReport:
    """Every table sums to one within its certified tail bound, and the
    analytic bound itself covers the residual."""
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        for process in "LXYZ":
            for t in times:
                table = pmf_table(process, params, t, n_max)
                total = table.total()
                errors.append(max(0.0, abs(1.0 - total) - table.tail_bound))
                errors.append(max(0.0, (1.0 - total) - table.analytic_tail - 1e-15))
    return _numeric_report("normalization", f"alpha in {list(alphas)}, t in {list(times)}, N={n_max}",
                           "tables sum to one up to their certified tails", errors, 1e-12)


def check_semigroup(alphas, times, support: int = 50) -> IdentityReport:
    """``P(t) * P(s) = P(t+s)`` in total variation on ``0..support``."""
    errors = []
    for alpha in alphas:
        params = selection_a(alpha)
        for process in "LXYZ":
            for t in times:
                for s in times:
                    lhs = convolve(pmf_table(process, params, t, support),
                                   pmf_table(process, params, s, support))
                    rhs = pmf_table(process, params, t + s, support)
                    errors.append(0.5 * math.fsum(np.abs(lhs.mass - rhs.mass)))
    return _numeric_report("semigroup", f"alpha in {list(alphas)}, t,s in {list(times)}, n<={support}",
                           "convolution semigroup of each Levy process", errors, 1e-10)


def check_pgf(alphas, times=(0.5, 1.0, 2.5), points=(0.3, 0.9), n_max: int = 400) -> IdentityReport:
    errors = []
    for alpha in alphas:
        params = ProcessParams(alpha)
        for t in times:
            table = pmf_table("L", params, t, n_max)
            for s in points:
                series = math.fsum(table.mass * s ** np.arange(n_max + 1))
                closed = (alpha / params.A) ** t * (1.0 + log_series_G(alpha, s)) ** t
                errors.append(abs(series - closed))
    return _numeric_report("pgf_L", f"alpha in {list(alphas)}, t in {list(times)}, s in {list(points)}",
                           "probability generating function of L", errors, 1e-10)


# ---------------------------------------------------------------------------
# Suite


@dataclass(frozen=True)
class SuiteConfig:
    """Grid bounds for :func:`run_full_suite`.

    ``max_mn`` bounds the Bell-heavy double grids, ``max_linear`` the single
    index checks, ``max_shift`` the shifted-measure check.  A value of 0 or an
    empty tuple disables the checks that use it.
    """

    max_mn: int = 12
    max_linear: int = 30
    max_shift: int = 100
    alphas: tuple = (0.5, 2.0 / 3.0)
    times: tuple = (0.3, 1.0, 2.5)
    quadrature_times: tuple = (0.5, 1.0, 2.0)
    quadrature_n: int = 8
    table_n: int = 400
    semigroup_times: tuple = (0.5, 1.3)
    c_override: Optional[CoefficientSequence] = field(default=None, compare=False)

    @classmethod
    def empty(cls) -> "SuiteConfig":
        return cls(0, 0, 0, (), (), (), 0, 0, ())

    def capped(self, max_n: int) -> "SuiteConfig":
        """Same suite with every index bound reduced to ``max_n``."""
        return replace(self, max_mn=min(self.max_mn, max_n), max_linear=min(self.max_linear, max_n),
                       max_shift=min(self.max_shift, max_n), quadrature_n=min(self.quadrature_n, max_n))


def suite_checks(config: SuiteConfig) -> list[tuple[str, Callable[[], IdentityReport]]]:
    """Named thunks for every check enabled by ``config``."""
    c = config
    checks: list[tuple[str, Callable[[], IdentityReport]]] = []
    if c.max_mn:
        checks += [
            ("combinatorics_identity", lambda: check_combinatorics_grid(c.max_mn, c.max_mn, c.c_override)),
            ("convolution_dual_forms", lambda: check_convolution_forms(c.max_mn, c.max_mn, c.c_override)),
            ("stirling_expansions", lambda: check_stirling_basics(c.max_mn)),
            ("stirling_harmonic", lambda: check_harmonic_relations(c.max_mn)),
            ("bell_scaling", lambda: check_bell_scaling(min(c.max_mn, 10))),
            ("matrix_composition", lambda: check_matrix_composition(min(c.max_mn, 10))),
            ("L_falling_vs_powers_polynomial", lambda: check_falling_powers_equivalence(c.max_mn)),
            ("Y_stirling_vs_bell_polynomial", lambda: check_Y_forms_polynomial(c.max_mn)),
            ("Z_series_equivalence", lambda: check_Z_series_coefficients(c.max_mn, 3 * c.max_mn)),
            ("worked_values", check_worked_values),
        ]
    if c.max_linear:
        checks += [
            ("steutel_recurrence", lambda: check_steutel_recurrence(c.max_linear)),
            ("vague_limits", lambda: check_vague_limits(c.max_linear)),
        ]
    if c.max_shift:
        checks.append(("shifted_measure", lambda: check_shifted_measure(c.max_shift)))
    for alpha in c.alphas:
        checks += [
            (f"selection_A[{alpha:.6g}]", lambda a=alpha: check_selection_inequalities("A", a)),
            (f"selection_B[{alpha:.6g}]", lambda a=alpha: check_selection_inequalities("B", a)),
            (f"remark3_inequalities[{alpha:.6g}]", lambda a=alpha: check_remark3_inequalities(a)),
        ]
    if c.alphas and c.times and c.max_mn:
        checks.append(("dual_formulas_float", lambda: check_dual_formulas(c.alphas, c.times, c.max_mn)))
        checks.append(("Z_series_float", lambda: check_Z_series_float(c.alphas, c.times, c.max_mn)))
    if c.alphas and c.quadrature_times and c.quadrature_n:
        checks.append(("Y_integral_representation",
                       lambda: check_integral_representation(c.alphas, c.quadrature_times, c.quadrature_n)))
        checks.append(("Y_small_time_limit",
                       lambda: check_small_time_limit_Y(c.alphas, min(5, c.quadrature_n))))
    if c.alphas and c.times and c.table_n:
        checks.append(("normalization", lambda: check_normalization(c.alphas, c.times, c.table_n)))
        checks.append(("pgf_L", lambda: check_pgf(c.alphas, n_max=c.table_n)))
    if c.alphas and c.semigroup_times:
        checks.append(("semigroup", lambda: check_semigroup(c.alphas, c.semigroup_times)))
    return checks


def run_full_suite(config: Optional[SuiteConfig] = None) -> list[IdentityReport]:
    """Run every enabled check in a fixed order."""
    config = SuiteConfig() if config is None else config
    return [thunk() for _, thunk in suite_checks(config)]


def failures(reports: Iterable[IdentityReport]) -> list[IdentityReport]:
    return [r for r in reports if not r.passed]
