"""Samplers for ``L``, ``X``, ``Y`` and ``Z`` and comparison with analytic pmfs.

Every process can be drawn as a compound Poisson process from its Lévy
measure.  ``Y`` and ``Z`` can also be drawn by subordination: a Gamma or
Poisson random time fed to the ground process.  Random streams come from
``Philox`` keyed by ``(seed, chunk index)``, so results do not depend on how
chunks are spread over workers.
"""

from __future__ import annotations

import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from .charfun import PROCESSES, LevyMeasure, ProcessParams, levy_measure
from .transition import PmfTable, pmf_table

CONSTRUCTIONS = ("compound_poisson", "subordination")
SUBORDINATED = ("Y", "Z")
CDF_CUTOFF = 1e-12


# ---------------------------------------------------------------------------
# Discrete inverse-CDF sampling


class InverseCdfTable:
    """Sampler for a law on ``offset, offset+1, ...`` given its probabilities.

    The table stops once the cumulative mass exceeds ``1 - CDF_CUTOFF``; the
    remaining mass is given to the last entry.
    """

    def __init__(self, probabilities, offset: int = 0) -> None:
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0):
            raise ValueError("probabilities must be a nonempty nonnegative vector")
        cdf = np.cumsum(p)
        if cdf[-1] < 1.0 - CDF_CUTOFF - 1e-13:
            raise ValueError(f"probabilities only reach cumulative mass {cdf[-1]!r}")
        stop = int(np.searchsorted(cdf, 1.0 - CDF_CUTOFF, side="left"))
        cdf = cdf[: stop + 1].copy()
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        self.cdf = cdf
        self.offset = int(offset)

    @property
    def support_max(self) -> int:
        return self.offset + self.cdf.size - 1

    def shifted(self, by: int) -> "InverseCdfTable":
        """Same table for the law moved by ``by``."""
        out = object.__new__(InverseCdfTable)
        out.cdf, out.offset = self.cdf, self.offset + int(by)
        return out

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        u = rng.random(size)
        return self.offset + np.searchsorted(self.cdf, u, side="right").astype(np.int64)


def _normalized_measure_table(measure: LevyMeasure) -> InverseCdfTable:
    n = 64
    while True:
        probs = measure.atoms(n)[1:] / measure.total_mass
        if math.fsum(probs) >= 1.0 - CDF_CUTOFF:
            return InverseCdfTable(probs, offset=1)
        n *= 2
        if n > 1 << 20:
            raise ValueError(f"jump law of {measure.name} has too heavy a tail to tabulate")


_JUMP_TABLES: "weakref.WeakKeyDictionary[LevyMeasure, InverseCdfTable]" = weakref.WeakKeyDictionary()


def jump_table(measure: LevyMeasure) -> InverseCdfTable:
    """Inverse-CDF table of the jump law ``Pi(n) / theta``, cached per measure."""
    table = _JUMP_TABLES.get(measure)
    if table is None:
        table = _normalized_measure_table(measure)
        _JUMP_TABLES[measure] = table
    return table


@lru_cache(maxsize=64)
def _measure(process: str, params: ProcessParams) -> LevyMeasure:
    # a shared instance per parameter set keeps its jump table cached
    return levy_measure(process, params)


def _L1_table(params: ProcessParams) -> InverseCdfTable:
    """Table for ``L(1)`` on ``0, 1, ...``: the log-series jump law of ``X``
    shifted down by one."""
    return jump_table(_measure("X", params)).shifted(-1)


def _sum_by_owner(counts: np.ndarray, jumps: np.ndarray) -> np.ndarray:
    owner = np.repeat(np.arange(counts.size), counts)
    return np.bincount(owner, weights=jumps, minlength=counts.size).round().astype(np.int64)


def _sum_of_draws(table: InverseCdfTable, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    jumps = table.sample(rng, int(counts.sum()))
    return _sum_by_owner(counts.ravel(), jumps).reshape(counts.shape)


def _maybe_scalar(values: np.ndarray, size):
    return int(values.reshape(-1)[0]) if size is None else values


# ---------------------------------------------------------------------------
# Samplers


def sample_compound_poisson(measure: LevyMeasure, t: float, rng: np.random.Generator, size=None):
    """Value at time ``t`` of the compound Poisson process with Lévy measure
    ``measure``: ``Poisson(theta t)`` jumps drawn from ``Pi / theta``."""
    if not t > 0:
        raise ValueError("t must be positive")
    shape = 1 if size is None else size
    counts = rng.poisson(measure.total_mass * t, shape)
    return _maybe_scalar(_sum_of_draws(jump_table(measure), counts, rng), size)


def sample_Y_subordination(params: ProcessParams, t: float, rng: np.random.Generator, size=None):
    """``X(G)`` with ``G ~ Gamma(shape t, scale beta)`` independent of ``X``."""
    beta = params.require_beta()
    if not t > 0:
        raise ValueError("t must be positive")
    shape = 1 if size is None else size
    gamma_time = rng.gamma(t, beta, shape)
    measure = _measure("X", params)
    counts = rng.poisson(measure.total_mass * gamma_time)
    return _maybe_scalar(_sum_of_draws(jump_table(measure), counts, rng), size)


def sample_Z_subordination(params: ProcessParams, t: float, rng: np.random.Generator, size=None):
    """``L(K)`` with ``K ~ Poisson(b t)``: a sum of ``K`` draws of ``L(1)``."""
    b = params.require_b()
    if not t > 0:
        raise ValueError("t must be positive")
    shape = 1 if size is None else size
    counts = rng.poisson(b * t, shape)
    return _maybe_scalar(_sum_of_draws(_L1_table(params), counts, rng), size)


def sample_process(process: str, construction: str, params: ProcessParams, t: float,
                   rng: np.random.Generator, size=None):
    _check_combination(process, construction)
    if construction == "compound_poisson":
        return sample_compound_poisson(_measure(process, params), t, rng, size)
    if process == "Y":
        return sample_Y_subordination(params, t, rng, size)
    return sample_Z_subordination(params, t, rng, size)


def _check_combination(process: str, construction: str) -> None:
    if process not in PROCESSES:
        raise ValueError(f"unknown process {process!r}")
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction!r}")
    if construction == "subordination" and process not in SUBORDINATED:
        raise ValueError(f"subordination is only available for Y and Z, not {process}")


# ---------------------------------------------------------------------------
# Configuration and empirical laws


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    sample_count: int
    process: str
    construction: str
    params: ProcessParams
    t: float
    chunk_size: int = 250_000
    workers: int = 1

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.sample_count) <= 0:
            raise ValueError("sample_count must be positive")
        if not (float(self.t) > 0 and math.isfinite(self.t)):
            raise ValueError("t must be positive")
        if int(self.chunk_size) <= 0 or int(self.workers) <= 0:
            raise ValueError("chunk_size and workers must be positive")
        _check_combination(self.process, self.construction)
        if self.process == "Y":
            self.params.require_beta()
        if self.process == "Z":
            self.params.require_b()

    def stream(self, index: int) -> np.random.Generator:
        """Independent generator for chunk ``index``."""
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(index),))
        return np.random.Generator(np.random.Philox(seq))

    def chunks(self) -> list[tuple[int, int]]:
        n_chunks = -(-int(self.sample_count) // int(self.chunk_size))
        sizes = [self.chunk_size] * (n_chunks - 1)
        sizes.append(self.sample_count - self.chunk_size * (n_chunks - 1))
        return list(enumerate(sizes))


@dataclass(frozen=True)
class EmpiricalPmf:
    """Counts of observed values; ``total`` is the number of samples."""

    counts: dict = field(default_factory=dict)
    total: int = 0

    def __post_init__(self) -> None:
        if any(int(k) < 0 or int(v) < 0 for k, v in self.counts.items()):
            raise ValueError("counts must be nonnegative and indexed by nonnegative integers")
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalPmf":
        samples = np.asarray(samples, dtype=np.int64).ravel()
        if samples.size == 0:
            return cls({}, 0)
        if samples.min() < 0:
            raise ValueError("samples must be nonnegative")
        binned = np.bincount(samples)
        counts = {int(n): int(c) for n, c in enumerate(binned) if c}
        return cls(counts, int(samples.size))

    def merge(self, other: "EmpiricalPmf") -> "EmpiricalPmf":
        counts = dict(self.counts)
        for n, c in other.counts.items():
            counts[n] = counts.get(n, 0) + c
        return EmpiricalPmf(counts, self.total + other.total)

    @property
    def support_max(self) -> int:
        return max(self.counts, default=0)

    def frequency(self, n: int) -> float:
        return self.counts.get(n, 0) / self.total if self.total else 0.0

    def as_array(self, n_max: Optional[int] = None) -> np.ndarray:
        """Counts for ``0..n_max``; anything above ``n_max`` is left out."""
        n_max = self.support_max if n_max is None else n_max
        out = np.zeros(n_max + 1, dtype=np.int64)
        for n, c in self.counts.items():
            if n <= n_max:
                out[n] = c
        return out

    def mean(self) -> float:
        return math.fsum(n * c for n, c in self.counts.items()) / self.total

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(c * (n - m) ** 2 for n, c in self.counts.items()) / self.total


def draw_samples(config: SamplerConfig) -> np.ndarray:
    """All samples of ``config`` in chunk order."""
    def one(chunk):
        index, size = chunk
        return sample_process(config.process, config.construction, config.params, config.t,
                              config.stream(index), size)

    chunks = config.chunks()
    if config.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(one, chunks))
    else:
        parts = [one(c) for c in chunks]
    return np.concatenate(parts)


def run_sampler(config: SamplerConfig) -> EmpiricalPmf:
    """Empirical law of ``config.sample_count`` draws."""
    def one(chunk):
        index, size = chunk
        values = sample_process(config.process, config.construction, config.params, config.t,
                                config.stream(index), size)
        return EmpiricalPmf.from_samples(values)

    chunks = config.chunks()
    if config.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(one, chunks))
    else:
        parts = [one(c) for c in chunks]
    result = EmpiricalPmf({}, 0)
    for part in parts:
        result = result.merge(part)
    return result


# ---------------------------------------------------------------------------
# Comparisons


class ChiSquareResult(NamedTuple):
    statistic: float
    pvalue: float
    dof: int


def total_variation(emp: EmpiricalPmf, analytic: PmfTable) -> float:
    """``(1/2) sum_n |emp(n) - p(n)|`` plus the mass neither side resolves.

    Empirical mass above the table and the table's tail bound are both added
    in full, so the result is an upper bound on the true distance.
    """
    if analytic.tail_bound >= 1e-6:
        raise ValueError("analytic table must have tail bound below 1e-6; increase its support")
    if emp.total <= 0:
        raise ValueError("empirical pmf is empty")
    n_max = analytic.support_max
    freq = emp.as_array(n_max) / emp.total
    beyond = math.fsum(c for n, c in emp.counts.items() if n > n_max) / emp.total
    diff = math.fsum(np.abs(freq - analytic.mass))
    return min(1.0, 0.5 * (diff + beyond + analytic.tail_bound))


def _pool_bins(weights: np.ndarray, minimum: float) -> list[tuple[int, int]]:
    """Greedy left-to-right grouping of consecutive bins so every group's
    weight reaches ``minimum``; a short final group joins its neighbour."""
    groups, start, acc = [], 0, 0.0
    for i, w in enumerate(weights):
        acc += w
        if acc >= minimum:
            groups.append((start, i + 1))
            start, acc = i + 1, 0.0
    if start < len(weights):
        if groups:
            groups[-1] = (groups[-1][0], len(weights))
        else:
            groups.append((start, len(weights)))
    return groups


def chi_square_two_sample(first: EmpiricalPmf, second: EmpiricalPmf,
                          min_count: float = 10.0) -> ChiSquareResult:
    """Homogeneity test of two empirical laws on pooled bins."""
    n_max = max(first.support_max, second.support_max)
    a, b = first.as_array(n_max), second.as_array(n_max)
    groups = _pool_bins(a + b, min_count)
    if len(groups) < 2:
        return ChiSquareResult(0.0, 1.0, 0)
    table = np.array([[a[s:e].sum() for s, e in groups], [b[s:e].sum() for s, e in groups]])
    stat, p, dof, _ = stats.chi2_contingency(table, correction=False)
    return ChiSquareResult(float(stat), float(p), int(dof))


def chi_square_goodness_of_fit(emp: EmpiricalPmf, analytic: PmfTable,
                               min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson test of ``emp`` against ``analytic``; the last pooled bin also
    holds everything above the table."""
    n_max = max(analytic.support_max, emp.support_max)
    expected = np.zeros(n_max + 1)
    expected[: analytic.support_max + 1] = analytic.mass
    expected *= emp.total / max(math.fsum(expected), 1e-300)
    observed = emp.as_array(n_max)
    groups = _pool_bins(expected, min_expected)
    if len(groups) < 2:
        return ChiSquareResult(0.0, 1.0, 0)
    obs = np.array([observed[s:e].sum() for s, e in groups], dtype=float)
    exp = np.array([expected[s:e].sum() for s, e in groups])
    stat, p = stats.chisquare(obs, exp)
    return ChiSquareResult(float(stat), float(p), len(groups) - 1)


def analytic_reference(process: str, params: ProcessParams, t: float,
                       n_min: int = 50, tail: float = 1e-9) -> PmfTable:
    """Analytic table with a support large enough that the tail bound is
    below ``tail``."""
    n = max(n_min, 50)
    while True:
        table = pmf_table(process, params, t, n)
        if table.tail_bound < tail:
            return table
        if n > 20000:
            raise ValueError("could not reach the requested tail bound")
        n *= 2


@dataclass(frozen=True)
class Comparison:
    empirical: EmpiricalPmf
    analytic: PmfTable
    total_variation: float
    chi_square: ChiSquareResult


def compare_with_analytic(config: SamplerConfig) -> Comparison:
    emp = run_sampler(config)
    table = analytic_reference(config.process, config.params, config.t, emp.support_max)
    return Comparison(emp, table, total_variation(emp, table), chi_square_goodness_of_fit(emp, table))
