"""Transition probabilities of ``L``, ``X``, ``Y`` and ``Z``.

Each process has at least two independent formulas.  Point functions combine
an exact rational coefficient sum (``t`` and other real inputs are taken at
the exact value of their binary representation) with float transcendental
prefactors.  :func:`pmf_table` builds whole tables up to large ``n`` using
positive-term float routes only, and :func:`cross_checked_table` compares two
of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .charfun import (
    EXACT_LIMIT,
    ParameterDomainError,
    ProcessParams,
    levy_measure,
    log_series_G,
)
from .combinatorics import (
    as_rational,
    bell_matrix,
    bell_partial,
    c_sequence,
    falling_factorial,
    log_stirling1_row,
    rising_factorial,
    stirling1_signed,
    stirling1_unsigned,
    w_sequence,
    y_sequence,
)

__all__ = [
    "CrossCheckError",
    "PmfTable",
    "SeriesValue",
    "pmf_L1",
    "pmf_Lm_stirling",
    "pmf_Lm_bell",
    "pmf_L_t_falling",
    "pmf_L_t_powers",
    "pmf_X",
    "pmf_Y_stirling",
    "pmf_Y_bell",
    "pmf_Z_bell",
    "pmf_Z_series",
    "Lm_coefficient_stirling",
    "Lm_coefficient_bell",
    "L_falling_polynomial",
    "L_powers_polynomial",
    "Y_stirling_polynomial",
    "Y_bell_polynomial",
    "Z_bell_polynomial",
    "Z_series_coefficient",
    "pmf_point",
    "pmf_table",
    "cross_checked_table",
    "pmf_tail_bound",
    "probability_generating_function",
    "convolve",
    "poisson_tail_bound",
]

TABLE_ROUTES = {
    "L": ("powers", "convolution"),
    "X": ("negative_binomial", "compound_poisson"),
    "Y": ("stirling", "bell"),
    "Z": ("bell", "series"),
}


class CrossCheckError(RuntimeError):
    """Two equivalent formulas disagreed beyond tolerance."""


class SeriesValue(NamedTuple):
    value: float
    tail: float


# ---------------------------------------------------------------------------
# Helpers


def _check_time(t) -> float:
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise ParameterDomainError(f"time must be a finite nonnegative number, got {t!r}")
    return t


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


def _combine(coefficient: Fraction, n: int, log_prefactor: float) -> float:
    """``coefficient / n! * exp(log_prefactor)``, in log space past ``EXACT_LIMIT``."""
    scaled = coefficient / math.factorial(n)
    if scaled == 0:
        return 0.0
    if n <= EXACT_LIMIT:
        return float(scaled) * math.exp(log_prefactor)
    return math.exp(math.log(float(scaled)) + log_prefactor)


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _eval_poly(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


# ---------------------------------------------------------------------------
# L: the logarithmic Lévy process


def pmf_L1(params: ProcessParams, n: int) -> float:
    """``P(L(1) = n) = alpha^(n+1) / (A (n+1))``."""
    n = _check_n(n)
    return math.exp((n + 1) * math.log(params.alpha) - math.log(params.A) - math.log(n + 1))


def Lm_coefficient_stirling(m: int, n: int) -> Fraction:
    """``|s(m+n, m)| m! n! / (m+n)!``."""
    return Fraction(stirling1_unsigned(m + n, m) * math.factorial(m) * math.factorial(n),
                    math.factorial(m + n))


def Lm_coefficient_bell(m: int, n: int) -> Fraction:
    """``sum_{k<=min(m,n)} m!/(m-k)! B_{n,k}(c)``."""
    c = c_sequence()
    return sum(
        (Fraction(math.factorial(m), math.factorial(m - k)) * bell_partial(c, n, k)
         for k in range(0, min(m, n) + 1)),
        Fraction(0),
    )


def _Lm_prefactor(params: ProcessParams, m: int, n: int) -> float:
    return m * math.log(params.alpha / params.A) + n * math.log(params.alpha)


def pmf_Lm_stirling(params: ProcessParams, m: int, n: int) -> float:
    """``P(L(m) = n)`` for the ``m``-fold convolution via Stirling numbers."""
    m, n = _check_n(m), _check_n(n)
    if m == 0:
        return 1.0 if n == 0 else 0.0
    return _combine(Lm_coefficient_stirling(m, n), n, _Lm_prefactor(params, m, n))


def pmf_Lm_bell(params: ProcessParams, m: int, n: int) -> float:
    """``P(L(m) = n)`` via partial Bell polynomials of ``c``."""
    m, n = _check_n(m), _check_n(n)
    if m == 0:
        return 1.0 if n == 0 else 0.0
    return _combine(Lm_coefficient_bell(m, n), n, _Lm_prefactor(params, m, n))


def _L_prefactor(params: ProcessParams, t: float, n: int) -> float:
    return t * math.log(params.alpha / params.A) + n * math.log(params.alpha)


def L_falling_coefficient(t, n: int) -> Fraction:
    """``sum_k [t]_{k,falling} B_{n,k}(c)`` for exact ``t``."""
    t = as_rational(t)
    c = c_sequence()
    return sum((falling_factorial(t, k) * bell_partial(c, n, k) for k in range(n + 1)), Fraction(0))


def L_powers_coefficient(t, n: int) -> Fraction:
    """``sum_k t^k B_{n,k}(y)`` for exact ``t``."""
    t = as_rational(t)
    y = y_sequence()
    return sum((t**k * bell_partial(y, n, k) for k in range(n + 1)), Fraction(0))


def L_falling_polynomial(n: int) -> list[Fraction]:
    """Coefficients in ``t`` of ``sum_k [t]_{k,falling} B_{n,k}(c)``, expanded
    with signed Stirling numbers."""
    c = c_sequence()
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        bk = bell_partial(c, n, k)
        if bk:
            for j in range(k + 1):
                out[j] += stirling1_signed(k, j) * bk
    return out


def L_powers_polynomial(n: int) -> list[Fraction]:
    """Coefficients in ``t`` of ``sum_k t^k B_{n,k}(y)``."""
    y = y_sequence()
    return [bell_partial(y, n, k) for k in range(n + 1)]


def pmf_L_t_falling(params: ProcessParams, t, n: int) -> float:
    """``P(L(t) = n)`` from the falling-factorial form."""
    t, n = _check_time(t), _check_n(n)
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    return _combine(L_falling_coefficient(t, n), n, _L_prefactor(params, t, n))


def pmf_L_t_powers(params: ProcessParams, t, n: int) -> float:
    """``P(L(t) = n)`` from the power-of-``t`` form with the ``y`` sequence."""
    t, n = _check_time(t), _check_n(n)
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    return _combine(L_powers_coefficient(t, n), n, _L_prefactor(params, t, n))


# ---------------------------------------------------------------------------
# X: negative binomial


def pmf_X(params: ProcessParams, u, n: int) -> float:
    """``(1-alpha)^u [u]_{n,rising} alpha^n / n!``, as a finite product."""
    u, n = _check_time(u), _check_n(n)
    if u == 0.0:
        return 1.0 if n == 0 else 0.0
    log_p = -u * params.A
    log_alpha = math.log(params.alpha)
    for j in range(n):
        log_p += math.log((u + j) / (j + 1)) + log_alpha
    return math.exp(log_p)


# ---------------------------------------------------------------------------
# Y: negative binomial directed by a Gamma subordinator


def Y_stirling_coefficient(t, n: int, r) -> Fraction:
    t, r = as_rational(t), as_rational(r)
    return sum(
        (stirling1_unsigned(n, k) * rising_factorial(t, k) * r**k for k in range(n + 1)),
        Fraction(0),
    )


def Y_bell_coefficient(t, n: int, r) -> Fraction:
    t = as_rational(t)
    w = w_sequence(as_rational(r))
    return sum((t**k * bell_partial(w, n, k) for k in range(n + 1)), Fraction(0))


def Y_stirling_polynomial(n: int, r) -> list[Fraction]:
    """Coefficients in ``t`` of ``sum_k |s(n,k)| [t]_{k,rising} r^k``."""
    r = as_rational(r)
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        a = stirling1_unsigned(n, k) * r**k
        if a:
            for j in range(k + 1):
                out[j] += a * stirling1_unsigned(k, j)
    return out


def Y_bell_polynomial(n: int, r) -> list[Fraction]:
    """Coefficients in ``t`` of ``sum_k t^k B_{n,k}(w)``."""
    w = w_sequence(as_rational(r))
    return [bell_partial(w, n, k) for k in range(n + 1)]


def _Y_prefactor(params: ProcessParams, t: float, n: int) -> float:
    return n * math.log(params.alpha) - t * math.log1p(params.A * params.require_beta())


def pmf_Y_stirling(params: ProcessParams, t, n: int) -> float:
    t, n = _check_time(t), _check_n(n)
    params.require_beta()
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    return _combine(Y_stirling_coefficient(t, n, params.r), n, _Y_prefactor(params, t, n))


def pmf_Y_bell(params: ProcessParams, t, n: int) -> float:
    t, n = _check_time(t), _check_n(n)
    params.require_beta()
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    return _combine(Y_bell_coefficient(t, n, params.r), n, _Y_prefactor(params, t, n))


# ---------------------------------------------------------------------------
# Z: logarithmic process directed by a Poisson subordinator


def _Z_theta(params: ProcessParams) -> float:
    b = params.require_b()
    return b - params.alpha * b / params.A


def Z_bell_polynomial(n: int) -> list[Fraction]:
    """Coefficients in ``x = alpha b t / A`` of ``sum_k x^k B_{n,k}(c)``."""
    c = c_sequence()
    return [bell_partial(c, n, k) for k in range(n + 1)]


def Z_series_coefficient(n: int, k: int) -> Fraction:
    """``|s(k+n, k)| n! / (n+k)!``: the coefficient of ``x^k`` in the Poisson
    series once ``exp(-b t) alpha^n / n!`` is factored out."""
    return Fraction(stirling1_unsigned(k + n, k) * math.factorial(n), math.factorial(n + k))


def pmf_Z_bell(params: ProcessParams, t, n: int) -> float:
    t, n = _check_time(t), _check_n(n)
    b = params.require_b()
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    x = as_rational(params.alpha * b * t / params.A)
    coef = _eval_poly(Z_bell_polynomial(n), x)
    return _combine(coef, n, n * math.log(params.alpha) - _Z_theta(params) * t)


def poisson_tail_bound(mean: float, k: int) -> float:
    """Chernoff bound on ``P(N > k)`` for ``N ~ Poisson(mean)``."""
    if k + 1 <= mean:
        return 1.0
    m = k + 1
    return min(1.0, math.exp(-mean + m * (1.0 + math.log(mean) - math.log(m))))


def _poisson_truncation(mean: float, tol: float = 1e-14) -> int:
    k = max(int(math.ceil(mean)), 1)
    while poisson_tail_bound(mean, k) >= tol:
        k += 1
    return k


def pmf_Z_series(params: ProcessParams, t, n: int, truncation: Optional[int] = None) -> SeriesValue:
    """``sum_{k<=K} P(L(k) = n) e^{-bt} (bt)^k / k!``, conditioning on the
    Poisson clock.  ``tail`` bounds the omitted mass ``P(Poisson(bt) > K)``.
    """
    t, n = _check_time(t), _check_n(n)
    b = params.require_b()
    if t == 0.0:
        return SeriesValue(1.0 if n == 0 else 0.0, 0.0)
    mean = b * t
    K = _poisson_truncation(mean) if truncation is None else int(truncation)
    if K < 0:
        raise ValueError("truncation must be nonnegative")
    terms = []
    for k in range(0, K + 1):
        log_pois = -mean + k * math.log(mean) - math.lgamma(k + 1)
        p = pmf_Lm_stirling(params, k, n)
        if p > 0.0:
            terms.append(p * math.exp(log_pois))
    return SeriesValue(math.fsum(terms), poisson_tail_bound(mean, K))


# ---------------------------------------------------------------------------
# Point dispatch


def pmf_point(process: str, params: ProcessParams, t, n: int) -> float:
    """Primary point formula for each process."""
    if process == "L":
        return pmf_L_t_powers(params, t, n)
    if process == "X":
        return pmf_X(params, t, n)
    if process == "Y":
        return pmf_Y_stirling(params, t, n)
    if process == "Z":
        return pmf_Z_bell(params, t, n)
    raise ValueError(f"unknown process {process!r}")


# ---------------------------------------------------------------------------
# Tables


@dataclass(frozen=True)
class PmfTable:
    """Probabilities ``p(0..N)`` and a certified bound on the omitted tail.

    ``tail_bound`` is the smaller of the analytic (generating-function) bound
    and the residual ``1 - sum p``; construction fails if the two are
    inconsistent, i.e. if ``sum p + tail_bound`` is not within ``1e-12`` of 1.
    """

    mass: np.ndarray
    tail_bound: float
    analytic_tail: float = math.inf
    label: str = ""

    def __post_init__(self) -> None:
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size == 0:
            raise ValueError("mass must be a nonempty 1-d array")
        if np.any(mass < -1e-300) or np.any(mass > 1.0 + 1e-12):
            raise ValueError("masses must lie in [0, 1]")
        mass = np.clip(mass, 0.0, 1.0)
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        if self.tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")
        total = math.fsum(mass) + self.tail_bound
        if abs(total - 1.0) > 1e-12:
            raise ValueError(
                f"{self.label or 'pmf'}: sum p + tail = {total!r} is not within 1e-12 of 1"
            )

    @classmethod
    def from_masses(cls, mass, analytic_tail: float = math.inf, label: str = "") -> "PmfTable":
        mass = np.asarray(mass, dtype=float)
        residual = max(0.0, 1.0 - math.fsum(np.clip(mass, 0.0, None)))
        return cls(mass, min(analytic_tail, residual), analytic_tail, label)

    @classmethod
    def delta(cls, support_max: int = 0, at: int = 0) -> "PmfTable":
        mass = np.zeros(support_max + 1)
        mass[at] = 1.0
        return cls(mass, 0.0, 0.0, f"delta_{at}")

    @property
    def support_max(self) -> int:
        return self.mass.shape[0] - 1

    def __getitem__(self, n: int) -> float:
        return float(self.mass[n]) if 0 <= n <= self.support_max else 0.0

    def total(self) -> float:
        return math.fsum(self.mass)

    def truncate(self, support_max: int) -> "PmfTable":
        """Restrict to ``0..support_max``, moving the dropped mass into the tail."""
        if support_max >= self.support_max:
            return self
        kept = self.mass[: support_max + 1]
        dropped = math.fsum(self.mass[support_max + 1 :])
        return PmfTable(kept, self.tail_bound + dropped, self.analytic_tail + dropped, self.label)


def convolve(p: PmfTable, q: PmfTable) -> PmfTable:
    """Law of the sum of independent variables with laws ``p`` and ``q``.

    The result lives on ``0..min(Np, Nq)``; entries there are exact sums.  Its
    tail bound is the mass the full product places beyond the support plus both
    input tail bounds.
    """
    n_max = min(p.support_max, q.support_max)
    a = p.mass[: n_max + 1]
    b = q.mass[: n_max + 1]
    full = np.convolve(a, b)
    dropped = (math.fsum(p.mass[n_max + 1 :]) * q.total()
               + math.fsum(q.mass[n_max + 1 :]) * p.total())
    beyond = math.fsum(full[n_max + 1 :]) + dropped
    bound = beyond + p.tail_bound + q.tail_bound
    analytic = beyond + p.analytic_tail + q.analytic_tail
    label = f"({p.label})*({q.label})"
    mass = full[: n_max + 1]
    residual = max(0.0, 1.0 - math.fsum(mass))
    return PmfTable(mass, min(bound, residual), analytic, label)


def probability_generating_function(process: str, params: ProcessParams, t: float, s: float) -> float:
    """Closed form ``E[s^P(t)] = exp(-t theta + t Q(s))`` for ``s`` inside the
    radius of the Lévy generating function."""
    measure = levy_measure(process, params)
    return math.exp(t * (measure.generating_function(s) - measure.total_mass))


def pmf_tail_bound(process: str, params: ProcessParams, t: float, n_max: int) -> float:
    """Certified bound on ``P(P(t) > n_max)`` by the Chernoff argument on the
    probability generating function: ``P(P(t) > N) <= F(t, rho) / rho^(N+1)``
    for any ``1 < rho < radius``."""
    t = _check_time(t)
    if t == 0.0:
        return 0.0
    measure = levy_measure(process, params)
    q, theta, hi = measure.generating_function, measure.total_mass, measure.radius

    def log_bound(rho: float) -> float:
        return t * (q(rho) - theta) - (n_max + 1) * math.log(rho)

    lo = 1.0 + 1e-12
    top = 1.0 + (hi - 1.0) * (1.0 - 1e-9)
    res = minimize_scalar(log_bound, bounds=(lo, top), method="bounded", options={"xatol": 1e-12})
    best = min(log_bound(res.x), log_bound(1.0 + 0.5 * (hi - 1.0)), 0.0)
    return math.exp(best) * (1.0 + 1e-9)


def _compound_poisson_masses(process: str, params: ProcessParams, t: float, n_max: int) -> np.ndarray:
    """``e^{-theta t} sum_k B_{n,k}(x) / n!`` with ``x_j = j! t Pi(j)``.

    For ``L`` this is the power form with ``y``, for ``Y`` the Bell form with
    ``w`` and for ``Z`` the Bell form with ``c`` (the scaling identity moves
    ``alpha^j`` and ``t`` into the sequence).
    """
    measure = levy_measure(process, params)
    m = bell_matrix(t * measure.atoms(n_max), n_max)
    return math.exp(-measure.total_mass * t) * m.sum(axis=1)


def _L_masses_convolution(params: ProcessParams, t: float, n_max: int) -> np.ndarray:
    """Integer ``t``: the m-fold convolution in Stirling form, log space.
    Otherwise the exact falling-factorial form, capped at ``EXACT_LIMIT``."""
    if float(t).is_integer() and t >= 1:
        m = int(t)
        log_pref = m * math.log(params.alpha / params.A)
        log_alpha = math.log(params.alpha)
        log_mfact = math.lgamma(m + 1)
        out = np.empty(n_max + 1)
        for n in range(n_max + 1):
            out[n] = math.exp(log_stirling1_row(m + n)[m] + log_mfact + log_pref + n * log_alpha)
        return out
    top = min(n_max, EXACT_LIMIT)
    return np.array([pmf_L_t_falling(params, t, n) for n in range(top + 1)])


def _X_masses_direct(params: ProcessParams, u: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    steps = np.log((u + n[:-1]) / (n[:-1] + 1.0)) + math.log(params.alpha)
    logs = np.concatenate(([0.0], np.cumsum(steps))) - u * params.A
    return np.exp(logs)


def _Y_masses_stirling(params: ProcessParams, t: float, n_max: int) -> np.ndarray:
    """``alpha^n/n! (1+A beta)^{-t} sum_k |s(n,k)| [t]_{k,rising} r^k``, log space."""
    log_r = math.log(params.r)
    log_rise = np.concatenate(([0.0], np.cumsum(np.log(t + np.arange(n_max)))))
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        k = np.arange(n + 1)
        logs = log_stirling1_row(n) + log_rise[: n + 1] + k * log_r
        finite = np.isfinite(logs)
        mx = logs[finite].max()
        s = math.fsum(np.exp(logs[finite] - mx))
        out[n] = math.exp(mx + math.log(s) + _Y_prefactor(params, t, n))
    return out


def _Z_masses_series(params: ProcessParams, t: float, n_max: int) -> np.ndarray:
    """Poisson-clock series with the Stirling form of ``P(L(k) = n)``.

    Large ``n`` is reached mostly through many Poisson jumps, so each row keeps
    summing past the fixed Poisson truncation until terms are negligible
    relative to the running sum.
    """
    b = params.require_b()
    mean = b * t
    K = _poisson_truncation(mean)
    log_q = math.log(params.alpha / params.A)
    log_alpha = math.log(params.alpha)
    log_mean = math.log(mean)
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        terms = [math.exp(-mean)] if n == 0 else []
        k = 1
        while True:
            # lgamma(k+1) from k! in P(L(k)=n) cancels the Poisson 1/k!
            log_term = (log_stirling1_row(k + n)[k] + k * (log_q + log_mean)
                        + n * log_alpha - mean)
            term = math.exp(log_term)
            terms.append(term)
            if k >= K and (term == 0.0 or term < 1e-18 * math.fsum(terms)):
                break
            k += 1
        out[n] = math.fsum(terms)
    return out


_ROUTE_FUNCTIONS = {
    ("L", "powers"): lambda p, t, n: _compound_poisson_masses("L", p, t, n),
    ("L", "convolution"): _L_masses_convolution,
    ("X", "negative_binomial"): _X_masses_direct,
    ("X", "compound_poisson"): lambda p, t, n: _compound_poisson_masses("X", p, t, n),
    ("Y", "stirling"): _Y_masses_stirling,
    ("Y", "bell"): lambda p, t, n: _compound_poisson_masses("Y", p, t, n),
    ("Z", "bell"): lambda p, t, n: _compound_poisson_masses("Z", p, t, n),
    ("Z", "series"): _Z_masses_series,
}


def _route_masses(process: str, route: str, params: ProcessParams, t: float, n_max: int) -> np.ndarray:
    try:
        fn = _ROUTE_FUNCTIONS[(process, route)]
    except KeyError:
        raise ValueError(f"no route {route!r} for process {process!r}") from None
    return fn(params, t, n_max)


def pmf_table(process: str, params: ProcessParams, t, n_max: int = 400,
              route: Optional[str] = None) -> PmfTable:
    """Table of ``P(P(t) = n)`` for ``n = 0..n_max``.

    ``route`` picks the formula (see ``TABLE_ROUTES``); the default is the
    first listed route for the process.
    """
    if process not in TABLE_ROUTES:
        raise ValueError(f"unknown process {process!r}")
    t = _check_time(t)
    n_max = _check_n(n_max)
    if process == "Y":
        params.require_beta()
    if process == "Z":
        params.require_b()
    if t == 0.0:
        return PmfTable.delta(n_max)
    route = route or TABLE_ROUTES[process][0]
    if route not in TABLE_ROUTES[process]:
        raise ValueError(f"no route {route!r} for process {process!r}")
    masses = _route_masses(process, route, params, t, n_max)
    if masses.shape[0] != n_max + 1:
        raise ValueError(f"route {route!r} for {process} is limited to n <= {masses.shape[0] - 1}")
    bound = pmf_tail_bound(process, params, t, n_max)
    return PmfTable.from_masses(masses, bound, f"{process}({t:g})")


def cross_checked_table(process: str, params: ProcessParams, t, n_max: int = 400,
                        rtol: float = 1e-10) -> PmfTable:
    """Primary table, verified entrywise against the secondary route.

    For ``L`` at non-integer ``t`` the secondary route is exact and only runs
    up to ``EXACT_LIMIT``, so the comparison covers that range.
    """
    primary = pmf_table(process, params, t, n_max)
    t = float(t)
    if t == 0.0:
        return primary
    second_route = TABLE_ROUTES[process][1]
    other = _route_masses(process, second_route, params, t, n_max)
    a = primary.mass[: other.shape[0]]
    scale = np.maximum(np.abs(a), np.abs(other))
    diff = np.abs(a - other)
    # entries below the normal float range carry no relative precision
    bad = (diff > rtol * scale) & (scale > 1e-290)
    if np.any(bad):
        n = int(np.argmax(bad))
        raise CrossCheckError(
            f"{process}: routes {TABLE_ROUTES[process][0]!r} and {second_route!r} disagree at "
            f"n={n}: {a[n]!r} vs {other[n]!r}"
        )
    return primary
