"""Moments, distribution tables and convergence reports for the refined statistic.

Exact quantities are carried as (numerator, denominator) integer pairs and
turned into :class:`fractions.Fraction` or floats only when a report is
built.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np
from scipy import special, stats

from .asym import double_factorial, theorem1_params
from .const import (
    DEFAULT_GUARD_DIGITS,
    SOURCE_JET,
    SOURCE_LAURENT,
    SOURCE_ORACLE,
)
from .errors import DegenerateDistributionError, JetOrderError, PmfUnavailableError
from .partitions import refined_poly_oracle
from .qseries import LaurentPoly, MomentJet, derivative_at_one
from .store import SeriesStore, default_store

_LOGGER = logging.getLogger(__name__)

# expected bin count below which chi-square bins are pooled
CHI_SQUARE_MIN_EXPECTED = 5.0

Source = str | LaurentPoly | MomentJet

__all__ = [
    "DistributionTable",
    "MomentReport",
    "chi_square_test",
    "convergence_report",
    "distribution_rows",
    "distribution_table",
    "gaussian_moment",
    "ks_distance",
    "moment_pair",
    "moment_report_rows",
    "normal_cdf",
    "normalized_moment",
    "raw_moment",
    "refined_mean_report",
    "scaled_quotient",
    "trace_mean",
]


def scaled_quotient(num: int, den: int, guard: int = DEFAULT_GUARD_DIGITS) -> float:
    """num/den as a float via integer division carrying ``guard`` extra digits."""
    if den == 0:
        raise ZeroDivisionError("moment denominator is zero")
    sign = -1 if (num < 0) != (den < 0) else 1
    scale = 10**guard
    return sign * ((abs(num) * scale) // abs(den)) / scale


def _coefficient(n: int, delta: int, source: Source, store: SeriesStore, order: int | None) -> LaurentPoly | MomentJet:
    """[t^n] of M_delta from the requested source."""
    if isinstance(source, (LaurentPoly, MomentJet)):
        return source
    if source == SOURCE_ORACLE:
        return refined_poly_oracle(n, delta)
    if source == SOURCE_LAURENT:
        return store.laurent(n, delta)
    if source == SOURCE_JET:
        if order is None:
            return store.jet(n, delta)
        return store.jet(n, delta, order)
    raise ValueError(f"unknown moment source {source!r}")


def moment_pair(coefficient: LaurentPoly | MomentJet, k: int) -> tuple[int, int]:
    """(q d/dq)^k p_n at q = 1 together with p_n(1)."""
    if k < 0:
        raise ValueError(f"moment order must be non-negative, got {k}")
    if isinstance(coefficient, MomentJet):
        if coefficient.order < k:
            raise JetOrderError(coefficient.order, k)
        return coefficient[k], coefficient[0]
    return derivative_at_one(coefficient, k), derivative_at_one(coefficient, 0)


def raw_moment(
    n: int,
    k: int,
    source: Source = SOURCE_ORACLE,
    *,
    delta: int = 0,
    order: int | None = None,
    store: SeriesStore | None = None,
) -> Fraction:
    """Exact k-th moment of delta*w0 + w+ - w- under the uniform measure on size n."""
    num, den = moment_pair(_coefficient(n, delta, source, store or default_store(), order), k)
    return Fraction(num, den)


def normalized_moment(
    n: int,
    k: int,
    source: Source = SOURCE_JET,
    *,
    delta: int = 0,
    order: int | None = None,
    store: SeriesStore | None = None,
) -> float:
    """n^{-2k/3} times the raw moment."""
    if n < 1:
        raise ValueError(f"normalized moments need n >= 1, got {n}")
    if order is None and source == SOURCE_JET:
        order = max(k, 1)
    num, den = moment_pair(_coefficient(n, delta, source, store or default_store(), order), k)
    if num == 0:
        return 0.0
    return scaled_quotient(num, den) / n ** (2.0 * k / 3.0)


def gaussian_moment(k: int, sigma2: float, mean: float = 0.0) -> float:
    """E[X^k] for X ~ N(mean, sigma2); (k-1)!! sigma2^{k/2} for even k when centred."""
    if k < 0:
        raise ValueError(f"moment order must be non-negative, got {k}")
    if mean == 0.0:
        return 0.0 if k % 2 else double_factorial(k - 1) * sigma2 ** (k // 2)
    return math.fsum(
        math.comb(k, 2 * j) * mean ** (k - 2 * j) * double_factorial(2 * j - 1) * sigma2**j
        for j in range(k // 2 + 1)
    )


def normal_cdf(x: Any) -> Any:
    """Standard normal CDF; floats in, floats out, arrays in, arrays out."""
    value = special.ndtr(x)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class DistributionTable:
    """Exact pmf of delta*w0 + w+ - w- on plane partitions of size n.

    ``weights[i]`` partitions take the value ``support[i]``; probabilities
    are ``weights[i] / total``.
    """

    n: int
    delta: int
    support: tuple[int, ...]
    weights: tuple[int, ...]

    @property
    def total(self) -> int:
        """Sum of the weights, p_n(1)."""
        return sum(self.weights)

    @property
    def probabilities(self) -> tuple[Fraction, ...]:
        """Exact probability of each support point."""
        total = self.total
        return tuple(Fraction(w, total) for w in self.weights)

    @cached_property
    def mean(self) -> Fraction:
        """Exact mean of the statistic."""
        return Fraction(sum(s * w for s, w in zip(self.support, self.weights, strict=True)), self.total)

    @cached_property
    def variance(self) -> Fraction:
        """Exact variance of the statistic."""
        second = Fraction(sum(s * s * w for s, w in zip(self.support, self.weights, strict=True)), self.total)
        return second - self.mean**2

    @cached_property
    def std_support(self) -> tuple[float, ...]:
        """Support standardized by the exact mean and standard deviation.

        A point mass standardizes to a single atom at 0.
        """
        if self.variance == 0:
            return (0.0,) * len(self.support)
        std = math.sqrt(self.variance)
        return tuple(float(s - self.mean) / std for s in self.support)

    @cached_property
    def cdf(self) -> tuple[float, ...]:
        """Cumulative probabilities at each support point."""
        running = 0
        values = []
        for weight in self.weights:
            running += weight
            values.append(scaled_quotient(running, self.total))
        return tuple(values)


def distribution_table(
    n: int,
    delta: int = 0,
    source: Source = SOURCE_LAURENT,
    *,
    store: SeriesStore | None = None,
) -> DistributionTable:
    """Exact pmf from a Laurent coefficient or the enumeration oracle."""
    if source == SOURCE_JET or isinstance(source, MomentJet):
        raise PmfUnavailableError(f"a moment jet carries no pmf (n={n}, delta={delta})")
    coefficient = _coefficient(n, delta, source, store or default_store(), None)
    assert isinstance(coefficient, LaurentPoly)
    pairs = list(coefficient.items())
    return DistributionTable(
        n=n,
        delta=delta,
        support=tuple(e for e, _ in pairs),
        weights=tuple(c for _, c in pairs),
    )


def _check_table(table: DistributionTable) -> None:
    """Raise when a table cannot be standardized."""
    if not table.support:
        raise DegenerateDistributionError(f"empty distribution table at n={table.n}")
    if any(w <= 0 for w in table.weights):
        raise DegenerateDistributionError(f"distribution table at n={table.n} has non-positive weights")


def ks_distance(table: DistributionTable) -> float:
    """Sup distance between the standardized CDF and the standard normal CDF.

    The sup of a step CDF against a continuous one is attained at a jump,
    from the left or from the right.
    """
    _check_table(table)
    points = np.asarray(table.std_support)
    after = np.asarray(table.cdf)
    before = np.concatenate(([0.0], after[:-1]))
    phi = special.ndtr(points)
    return float(max(np.max(np.abs(after - phi)), np.max(np.abs(before - phi))))


def _pool_bins(expected: Sequence[float], observed: Sequence[int]) -> tuple[list[float], list[int]]:
    """Merge adjacent bins until every expected count reaches the minimum."""
    pooled_expected: list[float] = []
    pooled_observed: list[int] = []
    acc_e, acc_o = 0.0, 0
    for e, o in zip(expected, observed, strict=True):
        acc_e += e
        acc_o += o
        if acc_e >= CHI_SQUARE_MIN_EXPECTED:
            pooled_expected.append(acc_e)
            pooled_observed.append(acc_o)
            acc_e, acc_o = 0.0, 0
    if acc_e > 0 or acc_o:
        if pooled_expected:
            pooled_expected[-1] += acc_e
            pooled_observed[-1] += acc_o
        else:
            pooled_expected.append(acc_e)
            pooled_observed.append(acc_o)
    return pooled_expected, pooled_observed


def chi_square_test(table: DistributionTable, observed: Mapping[int, int]) -> tuple[float, float]:
    """Goodness of fit of observed statistic counts against the exact pmf.

    Neighbouring bins are pooled until each expects at least five counts.
    Returns (statistic, p-value).
    """
    _check_table(table)
    unknown = set(observed) - set(table.support)
    if any(observed[s] for s in unknown):
        raise ValueError(f"observed values outside the support: {sorted(unknown)}")
    draws = sum(observed.values())
    if draws == 0:
        raise ValueError("chi-square test needs at least one observation")
    total = table.total
    expected = [draws * w / total for w in table.weights]
    counts = [observed.get(s, 0) for s in table.support]
    pooled_expected, pooled_observed = _pool_bins(expected, counts)
    if len(pooled_expected) < 2:
        return 0.0, 1.0
    result = stats.chisquare(pooled_observed, pooled_expected)
    return float(result.statistic), float(result.pvalue)


@dataclass(frozen=True)
class MomentReport:
    """One (n, k) row of a convergence study."""

    n: int
    k: int
    raw_num: int
    raw_den: int
    normalized: float
    gauss_ref: float
    abs_error: float

    @property
    def raw(self) -> Fraction:
        """Exact raw moment as a fraction."""
        return Fraction(self.raw_num, self.raw_den)


def convergence_report(
    k: int,
    n_list: Iterable[int],
    *,
    delta: int = 0,
    source: Source = SOURCE_JET,
    order: int | None = None,
    store: SeriesStore | None = None,
) -> list[MomentReport]:
    """Normalized k-th moments against the Gaussian limit with mean mu(delta) and variance sigma^2."""
    ns = sorted(set(n_list))
    if not ns:
        return []
    store = store or default_store()
    if source == SOURCE_JET:
        order = max(k, 1) if order is None else order
        if order < k:
            raise JetOrderError(order, k)
        # one expansion to the largest n serves the whole list
        store.jet_series(ns[-1], delta, order)
    elif source == SOURCE_LAURENT:
        store.laurent_series(ns[-1], delta)
    mu, sigma2 = theorem1_params(delta)
    reference = gaussian_moment(k, sigma2, mu)
    reports = []
    for n in ns:
        num, den = moment_pair(_coefficient(n, delta, source, store, order), k)
        normalized = 0.0 if num == 0 or n == 0 else scaled_quotient(num, den) / n ** (2.0 * k / 3.0)
        reports.append(
            MomentReport(
                n=n,
                k=k,
                raw_num=num,
                raw_den=den,
                normalized=normalized,
                gauss_ref=reference,
                abs_error=abs(normalized - reference),
            )
        )
    _LOGGER.debug("Built %s moment reports for k=%s delta=%s", len(reports), k, delta)
    return reports


def trace_mean(n: int, *, store: SeriesStore | None = None) -> Fraction:
    """Exact E[w0] over partitions of size n.

    The first jet moment of M_1 is E[w0 + w+ - w-], and E[w+ - w-] = 0.
    """
    jet = (store or default_store()).jet(n, 1, 1)
    return Fraction(jet[1], jet[0])


def refined_mean_report(
    delta: int, n_list: Iterable[int], *, store: SeriesStore | None = None
) -> list[MomentReport]:
    """Normalized mean of delta*w0 + w+ - w- against mu(delta)."""
    return convergence_report(1, n_list, delta=delta, store=store)


def moment_report_rows(reports: Iterable[MomentReport]) -> list[tuple[Any, ...]]:
    """CSV rows in MOMENT_REPORT_COLUMNS order."""
    return [
        (r.n, r.k, r.raw_num, r.raw_den, r.normalized, r.gauss_ref, r.abs_error) for r in reports
    ]


def distribution_rows(table: DistributionTable) -> list[tuple[Any, ...]]:
    """CSV rows in DISTRIBUTION_COLUMNS order."""
    total = table.total
    std = table.std_support
    phi = normal_cdf(np.asarray(std))
    return [
        (s, w, total, std[i], table.cdf[i], float(phi[i]))
        for i, (s, w) in enumerate(zip(table.support, table.weights, strict=True))
    ]
