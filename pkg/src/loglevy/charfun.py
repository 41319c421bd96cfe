"""Lévy measures, Bernstein functions and parameter selections for the four
integer-valued processes:

* ``L``: logarithmic Lévy process, ``L(1)`` log-series on ``{0, 1, ...}``;
* ``X``: negative-binomial process, Lévy measure ``alpha^n / n``;
* ``Y = X(T_beta)``: ``X`` time-changed by a Gamma subordinator (mean ``beta t``);
* ``Z = L(T_b)``: ``L`` time-changed by a Poisson subordinator (rate ``b``).

All four are driftless compound Poisson processes on the nonnegative integers,
so each is fully described by its atoms ``Pi(n)``, ``n >= 1``, and the total
mass ``theta = sum Pi(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .combinatorics import (
    as_rational,
    log_stirling1_row,
    w_sequence,
    y_sequence,
)

__all__ = [
    "ParameterDomainError",
    "ProcessParams",
    "LevyMeasure",
    "BernsteinFunction",
    "PROCESSES",
    "levy_measure",
    "levy_measure_L",
    "levy_measure_X",
    "levy_measure_Y",
    "levy_measure_Z",
    "levy_coefficient_L",
    "levy_coefficient_X",
    "levy_coefficient_Y",
    "levy_coefficient_Z",
    "log_series_G",
    "bernstein",
    "bernstein_L",
    "bernstein_X",
    "bernstein_gamma",
    "bernstein_poisson",
    "bernstein_Y",
    "bernstein_Z",
    "psi_L_closed_form",
    "psi_L_generating_form",
    "levy_generating_function",
    "selection_a",
    "selection_b",
]

PROCESSES = ("L", "X", "Y", "Z")

# Exact rational coefficients are used up to this index; beyond it the
# float recurrences / log-space sums take over.
EXACT_LIMIT = 60


class ParameterDomainError(ValueError):
    """A process parameter lies outside its admissible domain."""


@dataclass(frozen=True)
class ProcessParams:
    """Parameter bundle shared by all four processes.

    ``alpha`` in (0, 1) is common; ``beta`` (Gamma subordinator scale) is
    needed only by ``Y`` and ``b`` (Poisson subordinator rate) only by ``Z``.
    """

    alpha: float
    beta: Optional[float] = None
    b: Optional[float] = None
    A: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not (0.0 < alpha < 1.0):
            raise ParameterDomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        for name in ("beta", "b"):
            value = getattr(self, name)
            if value is None:
                continue
            value = float(value)
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterDomainError(f"{name} must be a positive finite number, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "A", -math.log1p(-alpha))

    def require_beta(self) -> float:
        if self.beta is None:
            raise ParameterDomainError("this process needs the Gamma subordinator scale beta")
        return self.beta

    def require_b(self) -> float:
        if self.b is None:
            raise ParameterDomainError("this process needs the Poisson subordinator rate b")
        return self.b

    @property
    def r(self) -> float:
        """``beta / (1 + A beta)``, the ratio driving the ``Y`` coefficients."""
        beta = self.require_beta()
        return beta / (1.0 + self.A * beta)

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "A": self.A, "beta": self.beta, "b": self.b}


# ---------------------------------------------------------------------------
# Generating function of the log-series family


def log_series_G(alpha: float, s: float) -> float:
    """``G(s) = sum_{k>=1} (alpha s)^k / (k+1) = -log(1 - alpha s)/(alpha s) - 1``."""
    x = alpha * s
    if x >= 1.0:
        return math.inf
    if abs(x) < 0.05:
        # series avoids the 0/0 in the closed form
        total, term, k = 0.0, 1.0, 1
        while True:
            term *= x
            inc = term / (k + 1)
            total += inc
            if abs(inc) < 1e-18 * max(abs(total), 1e-300):
                return total
            k += 1
    return -math.log1p(-x) / x - 1.0


# ---------------------------------------------------------------------------
# Lévy measures


class LevyMeasure:
    """Atoms ``Pi(n)``, ``n >= 1``, of an integer-valued Lévy measure.

    ``atoms_fn(n_max)`` returns a float array of length ``n_max + 1`` with a
    zero in slot 0.  ``generating_function`` is the closed form of
    ``Q(s) = sum s^n Pi(n)``, valid for ``-1 <= s < radius``; it supplies the
    certified tail bounds, since for any ``1 < rho < radius``
    ``Pi(n) <= Q(rho) rho^-n``.
    """

    def __init__(
        self,
        name: str,
        total_mass: float,
        atoms_fn: Callable[[int], np.ndarray],
        generating_function: Callable[[float], float],
        radius: float,
        exact_coefficient: Optional[Callable[[int], Fraction]] = None,
    ) -> None:
        self.name = name
        self.total_mass = float(total_mass)
        self._atoms_fn = atoms_fn
        self.generating_function = generating_function
        self.radius = float(radius)
        self.exact_coefficient = exact_coefficient
        self._cache: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f"LevyMeasure({self.name!r}, total_mass={self.total_mass!r})"

    def atoms(self, n_max: int) -> np.ndarray:
        """``[0, Pi(1), ..., Pi(n_max)]`` (read-only)."""
        if self._cache is None or self._cache.shape[0] <= n_max:
            size = max(n_max, 2 * (0 if self._cache is None else self._cache.shape[0] - 1), 16)
            arr = np.asarray(self._atoms_fn(size), dtype=float)
            arr.setflags(write=False)
            self._cache = arr
        return self._cache[: n_max + 1]

    def atom(self, n: int) -> float:
        if n < 1:
            raise ValueError("Lévy measure atoms are indexed from n = 1")
        return float(self.atoms(n)[n])

    def normalized_atom(self, n: int) -> float:
        return self.atom(n) / self.total_mass

    def normalized_atoms(self, n_max: int) -> np.ndarray:
        return self.atoms(n_max) / self.total_mass

    def tail_bound(self, n_max: int) -> float:
        """Certified upper bound on ``sum_{n > n_max} Pi(n)``."""
        q = self.generating_function
        hi = self.radius

        def log_bound(rho: float) -> float:
            return math.log(q(rho)) - n_max * math.log(rho) - math.log(rho - 1.0)

        lo = 1.0 + 1e-9
        top = 1.0 + (hi - 1.0) * (1.0 - 1e-9)
        res = minimize_scalar(log_bound, bounds=(lo, top), method="bounded",
                              options={"xatol": 1e-10})
        best = min(log_bound(res.x), log_bound(1.0 + 0.5 * (hi - 1.0)))
        return math.exp(best) * (1.0 + 1e-9)

    def default_truncation(self, tol: float = 1e-14) -> int:
        """Smallest ``N`` whose certified tail bound is below ``tol``."""
        n = 8
        while self.tail_bound(n) >= tol:
            n *= 2
        lo, hi = n // 2, n
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail_bound(mid) < tol:
                hi = mid
            else:
                lo = mid
        return hi

    def bernstein_sum(self, lam: float, n_max: int) -> float:
        """Truncated ``sum_{n<=n_max} (1 - exp(-lam n)) Pi(n)``."""
        n = np.arange(n_max + 1)
        return math.fsum(-np.expm1(-lam * n) * self.atoms(n_max))


@lru_cache(maxsize=None)
def _log_measure_coefficients(n_max: int) -> np.ndarray:
    """``Pi_L(n) / alpha^n`` for ``n <= n_max`` as floats.

    Exact (Bell-polynomial definition) up to ``EXACT_LIMIT``; beyond that the
    log-derivative recurrence of ``log(1 + G)``
    ``n q_n = n h_n - sum_{k<n} k q_k h_{n-k}``, ``h_j = 1/(j+1)``, which is the
    canonical Lévy-measure recurrence of ``L(1)`` written for coefficients.
    """
    q = np.zeros(n_max + 1)
    y = y_sequence()
    exact_top = min(n_max, EXACT_LIMIT)
    for n in range(1, exact_top + 1):
        q[n] = float(y(n) / math.factorial(n))
    if n_max > EXACT_LIMIT:
        h = 1.0 / (np.arange(n_max + 1) + 1.0)
        kq = np.arange(n_max + 1) * q
        for n in range(EXACT_LIMIT + 1, n_max + 1):
            s = float(np.dot(kq[1:n], h[n - 1 : 0 : -1]))
            q[n] = (n * h[n] - s) / n
            kq[n] = n * q[n]
    q.setflags(write=False)
    return q


def levy_coefficient_L(n: int) -> Fraction:
    """``Pi_L(n) / alpha^n = y_n / n!`` exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return y_sequence()(n) / math.factorial(n)


def levy_coefficient_X(n: int) -> Fraction:
    """``Pi_X(n) / alpha^n = 1/n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(1, n)


def levy_coefficient_Z(n: int) -> Fraction:
    """``Pi_Z(n) A / (b alpha^(n+1)) = 1/(n+1)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(1, n + 1)


def levy_coefficient_Y(n: int, r) -> Fraction:
    """``Pi_Y(n) / alpha^n = w_n / n!`` for an exact ``r = beta/(1 + A beta)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return w_sequence(as_rational(r))(n) / math.factorial(n)


def levy_measure_L(params: ProcessParams) -> LevyMeasure:
    alpha, A = params.alpha, params.A

    def atoms(n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1)
        return alpha**n * _log_measure_coefficients(n_max) * (n > 0)

    def q(s: float) -> float:
        return math.log1p(log_series_G(alpha, s))

    return LevyMeasure("L", math.log(A / alpha), atoms, q, 1.0 / alpha, levy_coefficient_L)


def levy_measure_X(params: ProcessParams) -> LevyMeasure:
    alpha, A = params.alpha, params.A

    def atoms(n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        out = np.zeros(n_max + 1)
        out[1:] = alpha ** n[1:] / n[1:]
        return out

    def q(s: float) -> float:
        return -math.log1p(-alpha * s)

    return LevyMeasure("X", A, atoms, q, 1.0 / alpha, levy_coefficient_X)


def _y_atoms(alpha: float, r: float, n_max: int) -> np.ndarray:
    """``alpha^n w_n / n!``, ``w_n / n! = sum_k |s(n,k)|/n! (k-1)! r^k``.

    Log-space Stirling sums up to ``EXACT_LIMIT``; beyond it the recurrence
    ``n p_n = r alpha^n + r sum_{k<n} k p_k alpha^(n-k) / (n-k)`` for the
    coefficients of ``-log(1 + r log(1 - alpha s))``, whose terms are all
    positive.  Working with atoms rather than coefficients avoids overflow,
    since ``w_n / n!`` grows geometrically.
    """
    out = np.zeros(n_max + 1)
    log_r, log_a = math.log(r), math.log(alpha)
    for n in range(1, min(n_max, EXACT_LIMIT) + 1):
        k = np.arange(1, n + 1)
        logs = log_stirling1_row(n)[1:] + np.array([math.lgamma(j) for j in k]) + k * log_r + n * log_a
        m = logs.max()
        out[n] = math.exp(m) * math.fsum(np.exp(logs - m))
    if n_max > EXACT_LIMIT:
        j = np.arange(1, n_max + 1, dtype=float)
        kernel = np.concatenate(([0.0], alpha**j / j))  # alpha^m / m
        kp = np.arange(n_max + 1) * out
        for n in range(EXACT_LIMIT + 1, n_max + 1):
            s = float(np.dot(kp[1:n], kernel[n - 1 : 0 : -1]))
            out[n] = r * (kernel[n] * n + s) / n
            kp[n] = n * out[n]
    return out


def levy_measure_Y(params: ProcessParams) -> LevyMeasure:
    alpha, A = params.alpha, params.A
    beta = params.require_beta()
    r = params.r
    exact_r = as_rational(r)

    def atoms(n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1)
        return _y_atoms(alpha, r, n_max)

    def q(s: float) -> float:
        return -math.log1p(r * math.log1p(-alpha * s))

    # Q_Y is finite while r * (-log(1 - alpha s)) < 1.
    radius = min(1.0 / alpha, -math.expm1(-1.0 / r) / alpha)
    return LevyMeasure("Y", math.log1p(A * beta), atoms, q, radius,
                       lambda n: levy_coefficient_Y(n, exact_r))


def levy_measure_Z(params: ProcessParams) -> LevyMeasure:
    alpha, A = params.alpha, params.A
    b = params.require_b()

    def atoms(n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        out = np.zeros(n_max + 1)
        out[1:] = b * alpha ** (n[1:] + 1) / (A * (n[1:] + 1))
        return out

    def q(s: float) -> float:
        return b * alpha / A * log_series_G(alpha, s)

    return LevyMeasure("Z", b * (A - alpha) / A, atoms, q, 1.0 / alpha, levy_coefficient_Z)


def levy_measure(process: str, params: ProcessParams) -> LevyMeasure:
    try:
        factory = {"L": levy_measure_L, "X": levy_measure_X,
                   "Y": levy_measure_Y, "Z": levy_measure_Z}[process]
    except KeyError:
        raise ValueError(f"unknown process {process!r}") from None
    return factory(params)


def levy_generating_function(measure: LevyMeasure, s: float, n_max: Optional[int] = None) -> float:
    """``sum_{n>=1} s^n Pi(n)`` by truncated summation, ``|s| <= 1``.

    The truncation defaults to the smallest level whose certified tail bound
    is below ``1e-14``.
    """
    if not (-1.0 <= s <= 1.0):
        raise ValueError(f"|s| must not exceed 1, got {s!r}")
    if n_max is None:
        n_max = measure.default_truncation()
    n = np.arange(n_max + 1)
    return math.fsum(np.power(s, n) * measure.atoms(n_max))


# ---------------------------------------------------------------------------
# Bernstein functions


@dataclass(frozen=True)
class BernsteinFunction:
    """Laplace exponent ``psi`` with ``E exp(-lam P(t)) = exp(-t psi(lam))``."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    value_at_infinity: float
    derivative_at_zero: float
    measure: Optional[LevyMeasure] = None

    def __call__(self, lam):
        arr = np.asarray(lam, dtype=float)
        if np.any(np.isnan(arr)) or np.any(arr < 0):
            raise ValueError("Bernstein functions are defined for lam >= 0")
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.where(np.isinf(arr), self.value_at_infinity, self.func(np.where(np.isinf(arr), 0.0, arr)))
        # rounding can leave -1 ulp at subnormal lam; psi >= 0 by definition
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out

    def value(self, lam):
        return self(lam)

    def deriv(self, lam):
        arr = np.asarray(lam, dtype=float)
        if np.any(arr < 0):
            raise ValueError("Bernstein functions are defined for lam >= 0")
        out = self.derivative(arr)
        return float(out) if np.ndim(out) == 0 else out


def _psi_X(alpha: float, lam):
    return np.log1p(-alpha * np.expm1(-lam) / (1.0 - alpha))


def psi_L_closed_form(params: ProcessParams, lam):
    """``log(A e^-lam / (-log(1 - alpha e^-lam)))`` evaluated literally."""
    a = params.alpha * np.exp(-np.asarray(lam, dtype=float))
    return np.log(params.A * np.exp(-np.asarray(lam, dtype=float)) / (-np.log1p(-a)))


def psi_L_generating_form(params: ProcessParams, lam):
    """``theta_L - log(1 + G(exp(-lam)))`` evaluated literally."""
    theta = math.log(params.A / params.alpha)
    lam = np.asarray(lam, dtype=float)
    g = np.vectorize(lambda v: log_series_G(params.alpha, math.exp(-v)))(lam)
    return theta - np.log1p(g)


def _psi_L(alpha: float, A: float, lam):
    lam = np.asarray(lam, dtype=float)
    # Near zero: psi_L = -lam - log1p(-psi_X/A), no catastrophic cancellation.
    small = -lam - np.log1p(-_psi_X(alpha, lam) / A)
    # Away from zero: the direct form, which keeps precision as lam grows.
    large = math.log(A) - lam - np.log(-np.log1p(-alpha * np.exp(-lam)))
    return np.where(lam < 1.0, small, large)


def bernstein_L(params: ProcessParams) -> BernsteinFunction:
    alpha, A = params.alpha, params.A

    def deriv(lam):
        e = alpha * np.exp(-lam)
        return e / ((1.0 - e) * (-np.log1p(-e))) - 1.0

    return BernsteinFunction(
        "L",
        lambda lam: _psi_L(alpha, A, lam),
        deriv,
        math.log(A / alpha),
        alpha / (A * (1.0 - alpha)) - 1.0,
        levy_measure_L(params),
    )


def bernstein_X(params: ProcessParams) -> BernsteinFunction:
    alpha = params.alpha

    def deriv(lam):
        e = alpha * np.exp(-lam)
        return e / (1.0 - e)

    return BernsteinFunction("X", lambda lam: _psi_X(alpha, lam), deriv, params.A,
                             alpha / (1.0 - alpha), levy_measure_X(params))


def bernstein_gamma(params: ProcessParams) -> BernsteinFunction:
    """Gamma subordinator ``log(1 + beta lam)``; unbounded, so ``psi(inf) = inf``."""
    beta = params.require_beta()
    return BernsteinFunction("gamma", lambda lam: np.log1p(beta * lam),
                             lambda lam: beta / (1.0 + beta * lam), math.inf, beta)


def bernstein_poisson(params: ProcessParams) -> BernsteinFunction:
    b = params.require_b()
    return BernsteinFunction("poisson", lambda lam: -b * np.expm1(-lam),
                             lambda lam: b * np.exp(-lam), b, b)


def bernstein_Y(params: ProcessParams) -> BernsteinFunction:
    alpha, A = params.alpha, params.A
    beta = params.require_beta()

    def deriv(lam):
        e = alpha * np.exp(-lam)
        return beta * e / ((1.0 + A * beta + beta * np.log1p(-e)) * (1.0 - e))

    return BernsteinFunction(
        "Y",
        lambda lam: np.log1p(beta * _psi_X(alpha, lam)),
        deriv,
        math.log1p(A * beta),
        alpha * beta / (1.0 - alpha),
        levy_measure_Y(params),
    )


def bernstein_Z(params: ProcessParams) -> BernsteinFunction:
    alpha, A = params.alpha, params.A
    b = params.require_b()

    def deriv(lam):
        el = np.exp(-lam)
        e = alpha * el
        return b / A * (e + (1.0 - e) * np.log1p(-e)) / (el * (1.0 - e))

    return BernsteinFunction(
        "Z",
        lambda lam: -b * np.expm1(-_psi_L(alpha, A, lam)),
        deriv,
        b * (1.0 - alpha / A),
        b / A * (alpha / (1.0 - alpha) - A),
        levy_measure_Z(params),
    )


def bernstein(process: str, params: ProcessParams) -> BernsteinFunction:
    try:
        factory = {"L": bernstein_L, "X": bernstein_X, "Y": bernstein_Y, "Z": bernstein_Z,
                   "gamma": bernstein_gamma, "poisson": bernstein_poisson}[process]
    except KeyError:
        raise ValueError(f"unknown process {process!r}") from None
    return factory(params)


# ---------------------------------------------------------------------------
# Parameter selections


def selection_a(alpha: float) -> ProcessParams:
    """``beta``, ``b`` equalizing total masses: ``theta_L = theta_Y`` and
    ``theta_X = theta_Z``."""
    A = ProcessParams(alpha).A
    return ProcessParams(alpha, beta=(A - alpha) / (A * alpha), b=A * A / (A - alpha))


def selection_b(alpha: float) -> ProcessParams:
    """``beta``, ``b`` equalizing means: ``psi_L'(0) = psi_Y'(0)`` and
    ``psi_X'(0) = psi_Z'(0)``."""
    A = ProcessParams(alpha).A
    gap = alpha - A * (1.0 - alpha)
    if gap <= 1e-15:
        raise ParameterDomainError(
            f"selection B needs alpha > A (1 - alpha); got alpha={alpha!r}, gap={gap!r}"
        )
    return ProcessParams(alpha, beta=1.0 / A - (1.0 - alpha) / alpha, b=A * alpha / gap)
