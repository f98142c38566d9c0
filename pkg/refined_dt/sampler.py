"""Rejection sampler for (size, w+ - w-, w0) under the uniform measure on size n.

Each factor 1/(1 - q^e t^m) of the product formula is a geometric
multiplicity with P(c = j) proportional to exp(-j m / N). Conditioning the
total size sum m*c on n gives the uniform law on plane partitions of size n,
whatever the radius N; the radius only sets the acceptance rate.

Per-factor draws are the literal construction (:func:`draw_once`). The
batched path draws, for every period m, the total over its m factors,
which is negative binomial, and splits accepted totals uniformly over weak
compositions: iid geometrics given their sum are uniform on compositions.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asym import saddle_N
from .const import (
    DEFAULT_ATTEMPT_BUDGET,
    DEFAULT_BATCH_SIZE,
    DEFAULT_PILOT_DRAWS,
    DEFAULT_SEED,
    DEFAULT_TAIL_MASS,
    DEFAULT_TARGET_ACCEPTED,
    DEFAULT_WINDOW,
    DEFAULT_WORKERS,
)
from .errors import AcceptanceCollapseError, SizeSummary
from .partitions import stat_triples

_LOGGER = logging.getLogger(__name__)

__all__ = [
    "SampleRecord",
    "SamplerConfig",
    "acceptance_rate_estimate",
    "compute_m_max",
    "draw_once",
    "exact_conditional_law",
    "expected_size",
    "sample_conditioned",
    "trace_proxy_matches_oracle",
    "worker_generators",
]


def _tail_terms(radius_N: float, m: np.ndarray) -> np.ndarray:
    """m^2 x^m / (1 - x^m) with x = exp(-1/N): the expected size from period m."""
    ratio = m / radius_N
    with np.errstate(under="ignore"):
        return m * m * np.exp(-ratio) / -np.expm1(-ratio)


def compute_m_max(radius_N: float, tail: float = DEFAULT_TAIL_MASS) -> int:
    """Smallest M whose neglected expected size sum_{m > M} m^2 x^m/(1 - x^m) is below ``tail``."""
    if radius_N <= 0:
        raise ValueError(f"radius must be positive, got {radius_N}")
    # terms beyond this horizon are far below any useful tail
    horizon = max(8, math.ceil(radius_N * (-math.log(tail) + 6.0 * math.log(radius_N + 2.0) + 60.0)))
    terms = _tail_terms(radius_N, np.arange(1, horizon + 1, dtype=np.float64))
    tails = np.cumsum(terms[::-1])[::-1]  # tails[i] = sum over m >= i + 1
    below = np.nonzero(tails < tail)[0]
    # sum over m > M is tails[M]; M = index of the first small tail
    return max(1, int(below[0])) if below.size else horizon


def expected_size(radius_N: float, m_max: int) -> float:
    """Unconditioned mean size: sum_{m <= m_max} m^2 x^m / (1 - x^m)."""
    return float(np.sum(_tail_terms(radius_N, np.arange(1, m_max + 1, dtype=np.float64))))


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of one conditioned sampling run.

    ``radius_N`` defaults to the saddle radius of n. ``m_max`` defaults to
    the tail cutoff, but never above n + window: larger periods can only
    produce rejected draws.
    """

    n: int
    radius_N: float | None = None
    m_max: int | None = None
    window: int = DEFAULT_WINDOW
    seed: int = DEFAULT_SEED
    target_accepted: int = DEFAULT_TARGET_ACCEPTED
    attempt_budget: int = DEFAULT_ATTEMPT_BUDGET
    workers: int = DEFAULT_WORKERS
    batch_size: int = DEFAULT_BATCH_SIZE
    tail: float = field(default=DEFAULT_TAIL_MASS, repr=False)

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if self.n < 0:
            raise ValueError(f"target size must be non-negative, got {self.n}")
        if self.window < 0:
            raise ValueError(f"window must be non-negative, got {self.window}")
        if self.workers < 1 or self.batch_size < 1:
            raise ValueError("workers and batch_size must be positive")
        radius = self.radius_N if self.radius_N is not None else saddle_N(max(self.n, 1))
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        object.__setattr__(self, "radius_N", float(radius))
        if self.m_max is None:
            cutoff = compute_m_max(radius, self.tail)
            object.__setattr__(self, "m_max", max(1, min(cutoff, self.n + self.window)))
        elif self.m_max < 1:
            raise ValueError(f"m_max must be at least 1, got {self.m_max}")

    @property
    def radius(self) -> float:
        """Radius N, the saddle radius unless set."""
        assert self.radius_N is not None
        return self.radius_N

    @property
    def periods(self) -> int:
        """Number of factor periods drawn."""
        assert self.m_max is not None
        return self.m_max

    def accepts(self, size: int) -> bool:
        """Whether a size lies inside the acceptance window."""
        return abs(size - self.n) <= self.window

    def as_dict(self) -> dict[str, float | int]:
        """Effective parameters, including the computed radius and cutoff."""
        return {
            "n": self.n,
            "radius_N": self.radius,
            "m_max": self.periods,
            "window": self.window,
            "seed": self.seed,
            "target_accepted": self.target_accepted,
            "attempt_budget": self.attempt_budget,
            "workers": self.workers,
            "batch_size": self.batch_size,
        }


@dataclass(frozen=True, slots=True)
class SampleRecord:
    """One draw: its size, w+ - w-, and the total multiplicity (distributed as w0)."""

    size: int
    stat: int
    trace_proxy: int
    worker: int = 0
    counter: int = 0


def draw_once(config: SamplerConfig, rng: np.random.Generator) -> SampleRecord:
    """One unconditioned draw, one geometric per factor (m, k).

    Inverse CDF: c = floor(-log(U) * N / m) with U uniform on (0, 1].
    """
    size = stat = trace = 0
    radius = config.radius
    for m in range(1, config.periods + 1):
        if math.exp(-m / radius) == 0.0:
            break
        u = 1.0 - rng.random(m)
        counts = np.floor(-np.log(u) * radius / m).astype(np.int64)
        total = int(counts.sum())
        if not total:
            continue
        exponents = np.arange(1 - m, m, 2, dtype=np.int64)
        size += m * total
        stat += int(np.dot(exponents, counts))
        trace += total
    return SampleRecord(size=size, stat=stat, trace_proxy=trace)


def _period_probabilities(config: SamplerConfig) -> tuple[np.ndarray, np.ndarray]:
    """Period sizes and NegBin success probabilities for each period."""
    periods = np.arange(1, config.periods + 1)
    success = -np.expm1(-periods / config.radius)
    return periods, success


def _split_statistic(rng: np.random.Generator, m: int, total: int) -> int:
    """w+ - w- contribution of ``total`` units spread uniformly over the m factors of period m."""
    if m == 1 or total == 0:
        return 0
    bars = np.sort(rng.choice(total + m - 1, size=m - 1, replace=False))
    edges = np.concatenate(([-1], bars, [total + m - 1]))
    parts = np.diff(edges) - 1
    return int(np.dot(np.arange(1 - m, m, 2), parts))


@dataclass
class _WorkerResult:
    records: list[SampleRecord]
    attempts: int
    size_sum: float
    size_sq_sum: float
    size_min: int
    size_max: int


def _run_worker(config: SamplerConfig, worker: int, rng: np.random.Generator, quota: int, budget: int) -> _WorkerResult:
    """Draw until ``quota`` records are accepted or ``budget`` attempts are spent."""
    periods, success = _period_probabilities(config)
    records: list[SampleRecord] = []
    attempts = 0
    size_sum = size_sq_sum = 0.0
    size_min, size_max = 0, 0
    while len(records) < quota and attempts < budget:
        batch = min(config.batch_size, budget - attempts)
        totals = rng.negative_binomial(periods, success, size=(batch, periods.size))
        sizes = totals @ periods
        size_sum += float(sizes.sum())
        size_sq_sum += float(np.dot(sizes.astype(np.float64), sizes))
        size_min = int(sizes.min()) if not attempts else min(size_min, int(sizes.min()))
        size_max = max(size_max, int(sizes.max()))
        for row in np.nonzero(np.abs(sizes - config.n) <= config.window)[0]:
            if len(records) == quota:
                break
            row_totals = totals[row]
            stat = sum(
                _split_statistic(rng, int(m), int(c))
                for m, c in zip(periods, row_totals, strict=True)
                if c
            )
            records.append(
                SampleRecord(
                    size=int(sizes[row]),
                    stat=stat,
                    trace_proxy=int(row_totals.sum()),
                    worker=worker,
                    counter=attempts + int(row),
                )
            )
        attempts += batch
    return _WorkerResult(records, attempts, size_sum, size_sq_sum, size_min, size_max)


def worker_generators(seed: int, workers: int) -> list[np.random.Generator]:
    """Independent streams: worker w uses child w of SeedSequence(seed)."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(workers)]


def _size_summary(results: list[_WorkerResult]) -> SizeSummary:
    """Merge the size statistics of every worker."""
    attempts = sum(r.attempts for r in results)
    if not attempts:
        return SizeSummary(0, math.nan, math.nan, 0, 0)
    mean = sum(r.size_sum for r in results) / attempts
    variance = max(sum(r.size_sq_sum for r in results) / attempts - mean * mean, 0.0)
    return SizeSummary(
        attempts=attempts,
        mean=mean,
        std=math.sqrt(variance),
        minimum=min(r.size_min for r in results if r.attempts),
        maximum=max(r.size_max for r in results if r.attempts),
    )


def sample_conditioned(config: SamplerConfig) -> Iterator[SampleRecord]:
    """Accepted records, merged in worker-then-counter order.

    The output depends only on (config, seed, workers). Raises
    :class:`AcceptanceCollapseError` when the attempt budget runs out first.
    """
    if config.window:
        _LOGGER.warning("Windowed sampling (window=%s) is approximate", config.window)
    workers = config.workers
    quotas = [config.target_accepted // workers + (w < config.target_accepted % workers) for w in range(workers)]
    budgets = [config.attempt_budget // workers + (w < config.attempt_budget % workers) for w in range(workers)]
    rngs = worker_generators(config.seed, workers)
    _LOGGER.debug("Sampling n=%s with %s workers, m_max=%s, N=%s", config.n, workers, config.periods, config.radius)

    if workers == 1:
        results = [_run_worker(config, 0, rngs[0], quotas[0], budgets[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_worker, config, w, rngs[w], quotas[w], budgets[w]) for w in range(workers)
            ]
            results = [future.result() for future in futures]

    accepted = sum(len(r.records) for r in results)
    if accepted < config.target_accepted:
        summary = _size_summary(results)
        _LOGGER.error("Sampler collected %s of %s records; sizes %s", accepted, config.target_accepted, summary)
        raise AcceptanceCollapseError(config.n, accepted, summary)
    _LOGGER.info("Sampler accepted %s records in %s attempts", accepted, sum(r.attempts for r in results))
    for result in results:
        yield from result.records


def acceptance_rate_estimate(config: SamplerConfig, draws: int = DEFAULT_PILOT_DRAWS) -> float:
    """Accepted fraction over a pilot batch of unconditioned sizes.

    At the saddle radius with window 0 this decays like n^{-2/3}.
    """
    rng = worker_generators(config.seed, 1)[0]
    periods, success = _period_probabilities(config)
    accepted = done = 0
    while done < draws:
        batch = min(config.batch_size, draws - done)
        sizes = rng.negative_binomial(periods, success, size=(batch, periods.size)) @ periods
        accepted += int(np.count_nonzero(np.abs(sizes - config.n) <= config.window))
        done += batch
    return accepted / draws


def exact_conditional_law(n: int) -> Counter[tuple[int, int]]:
    """Number of multiplicity vectors of size n for each (stat, trace_proxy).

    Every vector of size n has the same weight under the product measure,
    so these counts are the exact conditional law.
    """
    if n < 0:
        raise ValueError(f"size must be non-negative, got {n}")
    states: Counter[tuple[int, int, int]] = Counter({(n, 0, 0): 1})
    for m in range(1, n + 1):
        for exponent in range(1 - m, m, 2):
            grown: Counter[tuple[int, int, int]] = Counter()
            for (remaining, stat, trace), count in states.items():
                for c in range(remaining // m + 1):
                    grown[(remaining - m * c, stat + exponent * c, trace + c)] += count
            states = grown
    return Counter({(stat, trace): count for (remaining, stat, trace), count in states.items() if remaining == 0})


def trace_proxy_matches_oracle(n: int) -> bool:
    """Does the (stat, trace_proxy) law equal the enumerated (w+ - w-, w0) law at size n?"""
    oracle = Counter((t.stat, t.w0) for t in stat_triples(n))
    return exact_conditional_law(n) == oracle
