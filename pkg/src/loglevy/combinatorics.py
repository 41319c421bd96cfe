"""Exact enumerative combinatorics: factorials, Stirling numbers of the first
kind, partial Bell polynomials and generalized harmonic numbers.

Every exact routine works on :class:`fractions.Fraction` (aliased as
``ExactRational``) and plain Python ints; nothing here rounds.  A couple of
float helpers at the bottom (``bell_matrix``, ``log_stirling1_row``) serve the
large-``n`` probability tables, where only positive terms are summed.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterator

import numpy as np

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "as_rational",
    "factorial",
    "rising_factorial",
    "falling_factorial",
    "stirling1_unsigned",
    "stirling1_signed",
    "StirlingTable",
    "CoefficientSequence",
    "bell_partial",
    "bell_partial_bruteforce",
    "bell_scale_identity_check",
    "harmonic",
    "c_sequence",
    "h_sequence",
    "shifted_factorial_sequence",
    "y_sequence",
    "g_sequence",
    "w_sequence",
    "scaled_sequence",
    "bell_matrix",
    "log_stirling1_row",
]


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact rational.

    Floats are converted to the exact value of their binary representation,
    so ``as_rational(0.1)`` is *not* ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} as a rational")
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"unsupported type for exact arithmetic: {type(x).__name__}")


def _check_nonneg_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


def factorial(n: int) -> int:
    return math.factorial(_check_nonneg_int("n", n))


def rising_factorial(x, n: int) -> Fraction:
    """Pochhammer symbol ``x (x+1) ... (x+n-1)``; equals 1 for ``n == 0``."""
    n = _check_nonneg_int("n", n)
    x = as_rational(x)
    out = Fraction(1)
    for j in range(n):
        out *= x + j
    return out


def falling_factorial(x, n: int) -> Fraction:
    """``x (x-1) ... (x-n+1)``; equals 1 for ``n == 0``."""
    n = _check_nonneg_int("n", n)
    x = as_rational(x)
    out = Fraction(1)
    for j in range(n):
        out *= x - j
    return out


class StirlingTable:
    """Triangular table of unsigned Stirling numbers of the first kind.

    Rows are appended with ``|s(n+1,k)| = |s(n,k-1)| + n |s(n,k)|``.  Published
    rows are never mutated, so readers need no lock; growth is serialized.
    """

    def __init__(self) -> None:
        self._rows: list[tuple[int, ...]] = [(1,)]
        self._lock = threading.Lock()

    @property
    def max_n(self) -> int:
        return len(self._rows) - 1

    def row(self, n: int) -> tuple[int, ...]:
        if n > self.max_n:
            with self._lock:
                rows = self._rows
                while len(rows) <= n:
                    m = len(rows) - 1
                    prev = rows[m]
                    new = [0] * (m + 2)
                    for k in range(1, m + 2):
                        left = prev[k - 1]
                        right = prev[k] if k <= m else 0
                        new[k] = left + m * right
                    rows.append(tuple(new))
        return self._rows[n]

    def __call__(self, n: int, k: int) -> int:
        return self.row(n)[k]


_STIRLING = StirlingTable()


def stirling1_unsigned(n: int, k: int) -> int:
    """``|s(n,k)|``, the number of permutations of ``n`` with ``k`` cycles."""
    n = _check_nonneg_int("n", n)
    k = _check_nonneg_int("k", k)
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    return _STIRLING(n, k)


def stirling1_signed(n: int, k: int) -> int:
    value = stirling1_unsigned(n, k)
    return -value if (n - k) % 2 else value


class CoefficientSequence:
    """A named sequence ``x_1, x_2, ...`` of exact rationals.

    Terms are memoized, as are the rows of its partial Bell triangle; both
    caches only grow, under a per-instance lock.
    """

    def __init__(self, name: str, term: Callable[[int], object]) -> None:
        self.name = name
        self._term = term
        self._terms: dict[int, Fraction] = {}
        self._bell_rows: list[tuple[Fraction, ...]] = [(Fraction(1),)]
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"CoefficientSequence({self.name!r})"

    def __call__(self, k: int) -> Fraction:
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
            raise TypeError("sequence index must be an integer")
        k = int(k)
        if k < 1:
            raise ValueError(f"sequence {self.name} is indexed from 1, got {k}")
        try:
            return self._terms[k]
        except KeyError:
            pass
        value = as_rational(self._term(k))
        with self._lock:
            self._terms.setdefault(k, value)
        return self._terms[k]

    def terms(self, n: int) -> list[Fraction]:
        """``[x_1, ..., x_n]``."""
        return [self(j) for j in range(1, n + 1)]

    def bell_row(self, n: int) -> tuple[Fraction, ...]:
        """``(B_{n,0}, ..., B_{n,n})`` evaluated on this sequence."""
        if n >= len(self._bell_rows):
            with self._lock:
                rows = self._bell_rows
                while len(rows) <= n:
                    m = len(rows)
                    x = self.terms(m)
                    binom = [math.comb(m - 1, i - 1) for i in range(1, m + 1)]
                    new = [Fraction(0)] * (m + 1)
                    for k in range(1, m + 1):
                        acc = Fraction(0)
                        for i in range(1, m - k + 2):
                            below = rows[m - i]
                            if k - 1 < len(below):
                                b = below[k - 1]
                                if b:
                                    acc += binom[i - 1] * x[i - 1] * b
                        new[k] = acc
                    rows.append(tuple(new))
        return self._bell_rows[n]


def bell_partial(seq: CoefficientSequence, n: int, k: int) -> Fraction:
    """Partial Bell polynomial ``B_{n,k}`` evaluated on ``seq``.

    Uses ``B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i,k-1}``.  Boundary values:
    ``B_{0,0} = 1``, ``B_{n,0} = B_{0,k} = 0`` for ``n, k > 0``, and
    ``B_{n,k} = 0`` whenever ``k > n``.
    """
    n = _check_nonneg_int("n", n)
    k = _check_nonneg_int("k", k)
    if k > n:
        return Fraction(0)
    return seq.bell_row(n)[k]


def _partitions_with_parts(n: int, k: int, largest: int | None = None) -> Iterator[list[int]]:
    """Partitions of ``n`` into exactly ``k`` parts, parts nonincreasing."""
    if largest is None:
        largest = n
    if k == 0:
        if n == 0:
            yield []
        return
    for part in range(min(n - (k - 1), largest), 0, -1):
        if part * k < n:
            break
        for rest in _partitions_with_parts(n - part, k - 1, part):
            yield [part] + rest


def bell_partial_bruteforce(seq: CoefficientSequence, n: int, k: int) -> Fraction:
    """``B_{n,k}`` by enumerating partitions of ``n`` into ``k`` parts.

    Slow; kept as an independent check of :func:`bell_partial`.
    """
    if k > n:
        return Fraction(0)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for parts in _partitions_with_parts(n, k):
        mult: dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        term = Fraction(math.factorial(n))
        for j, kj in mult.items():
            term *= seq(j) ** kj
            term /= math.factorial(kj) * math.factorial(j) ** kj
        total += term
    return total


def scaled_sequence(seq: CoefficientSequence, a, b) -> CoefficientSequence:
    """The sequence ``a^j b x_j``."""
    a = as_rational(a)
    b = as_rational(b)
    return CoefficientSequence(f"({a})^j*({b})*{seq.name}", lambda j: a**j * b * seq(j))


def bell_scale_identity_check(a, b, seq: CoefficientSequence, n: int, k: int) -> bool:
    """Whether ``B_{n,k}(a^j b x_j) == a^n b^k B_{n,k}(x)`` holds exactly."""
    a = as_rational(a)
    b = as_rational(b)
    lhs = bell_partial(scaled_sequence(seq, a, b), n, k)
    rhs = a**n * b**k * bell_partial(seq, n, k)
    return lhs == rhs


def harmonic(n: int, order: int = 1) -> Fraction:
    """Generalized harmonic number ``sum_{j<=n} j^(-order)``."""
    if n < 1 or order < 1:
        raise ValueError("harmonic numbers need n >= 1 and order >= 1")
    return sum((Fraction(1, j**order) for j in range(1, n + 1)), Fraction(0))


# Sequences used throughout.  Module-level instances share their Bell caches.

_C = CoefficientSequence("c", lambda k: Fraction(math.factorial(k), k + 1))
_H = CoefficientSequence("h", lambda k: (-1) ** (k - 1) * math.factorial(k - 1))
_SHIFTED_FACTORIAL = CoefficientSequence("(j-1)!", lambda k: math.factorial(k - 1))


def _y_term(n: int) -> Fraction:
    row = _C.bell_row(n)
    return sum(
        ((-1) ** (k - 1) * math.factorial(k - 1) * row[k] for k in range(1, n + 1)),
        Fraction(0),
    )


_Y = CoefficientSequence("y", _y_term)


def c_sequence() -> CoefficientSequence:
    """``c_k = k!/(k+1)``."""
    return _C


def h_sequence() -> CoefficientSequence:
    """``h_k = (-1)^(k-1) (k-1)!``, the exponential coefficients of ``log(1+s)``."""
    return _H


def shifted_factorial_sequence() -> CoefficientSequence:
    """``(k-1)!``; its Bell triangle is the unsigned Stirling triangle."""
    return _SHIFTED_FACTORIAL


def y_sequence() -> CoefficientSequence:
    """``y_n = sum_k (-1)^(k-1) (k-1)! B_{n,k}(c)``."""
    return _Y


def g_sequence(alpha) -> CoefficientSequence:
    """``g_k = alpha^k k!/(k+1)`` for an exact ``alpha``."""
    a = as_rational(alpha)
    return CoefficientSequence(f"g[{a}]", lambda k: a**k * Fraction(math.factorial(k), k + 1))


def w_sequence(r) -> CoefficientSequence:
    """``w_n = sum_k |s(n,k)| (k-1)! r^k`` with ``r = beta/(1 + A beta)`` exact."""
    r = as_rational(r)

    def term(n: int) -> Fraction:
        row = _STIRLING.row(n)
        return sum(
            (row[k] * math.factorial(k - 1) * r**k for k in range(1, n + 1)),
            Fraction(0),
        )

    return CoefficientSequence(f"w[{r}]", term)


# ---------------------------------------------------------------------------
# Float helpers for large tables


def bell_matrix(x_tilde, n_max: int) -> np.ndarray:
    """Float table ``M[n, k] = B_{n,k}(x) / n!`` for ``0 <= k <= n <= n_max``.

    ``x_tilde[j]`` must hold ``x_j / j!`` for ``j = 1..n_max`` (index 0 is
    ignored).  Column ``k`` is the power series ``X(s)^k / k!`` with
    ``X(s) = sum_j x_tilde[j] s^j``, built by repeated convolution.  Accurate
    when the sequence is nonnegative, since no cancellation occurs.
    """
    x_tilde = np.asarray(x_tilde, dtype=float)
    if x_tilde.shape[0] < n_max + 1:
        raise ValueError("x_tilde must have at least n_max + 1 entries")
    xt = np.zeros(n_max + 1)
    xt[1:] = x_tilde[1 : n_max + 1]
    out = np.zeros((n_max + 1, n_max + 1))
    col = np.zeros(n_max + 1)
    col[0] = 1.0
    out[:, 0] = col
    for k in range(1, n_max + 1):
        col = np.convolve(col, xt)[: n_max + 1] / k
        if not col.any():
            break
        out[:, k] = col
    return out


@lru_cache(maxsize=None)
def log_stirling1_row(n: int) -> np.ndarray:
    """``log(|s(n,k)| / n!)`` for ``k = 0..n`` (``-inf`` where the entry is 0)."""
    row = _STIRLING.row(n)
    log_nfact = math.log(math.factorial(n))
    out = np.full(n + 1, -np.inf)
    for k, v in enumerate(row):
        if v:
            out[k] = math.log(v) - log_nfact
    out.setflags(write=False)
    return out
