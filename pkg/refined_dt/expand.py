"""Truncated t-series expansion of the q-deformed MacMahon function.

M_delta(t, q) is the product over m >= 1 and 0 <= k < m of
1 / (1 - q**(delta + 2k + 1 - m) * t**m). Each factor is applied to a
truncated series with the prefix recurrence a'_n = a_n + w * a'_{n-m}, so
the same code expands over any coefficient ring that supports ``+`` and
``*``: exact Laurent polynomials, moment jets, integers or floats.

For moment jets at large truncation a second method is available. With
q = e**u the logarithm L = log M_delta(t, e**u) has explicit derivative
layers L^(i), and the layers of A = exp(L) follow from the product rule
applied to dA/du = (dL/du) * A. That turns the whole expansion into a
handful of integer t-series convolutions.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import operator
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Generic, TypeVar

import numpy as np
from mpmath import mp

from .const import (
    DEFAULT_JET_ORDER,
    DEFAULT_MPMATH_DPS,
    FACTOR_METHOD_MAX_N,
    METHOD_AUTO,
    METHOD_FACTORS,
    METHOD_LAYERS,
    RING_FLOAT,
    RING_FLOAT_JET,
    RING_INTEGER,
    RING_JET,
    RING_LAURENT,
    SERIES_LAURENT_COLUMNS,
)
from .errors import ExpansionCapError
from .qseries import LaurentPoly, MomentJet, jet_of_exponent

_LOGGER = logging.getLogger(__name__)

R = TypeVar("R")

__all__ = [
    "CoefficientRing",
    "FloatJetSeries",
    "TSeries",
    "evaluate_real",
    "expand_F2",
    "expand_M_delta",
    "expand_float_jet",
    "expand_macmahon",
    "expand_moment_layers",
    "factor_exponent",
    "mul_geometric_factor",
    "second_moment_series",
    "series_to_csv",
]


@dataclass(frozen=True)
class CoefficientRing(Generic[R]):
    """How to build the identity and the image of q**e in a coefficient ring."""

    name: str
    one: R
    zero: R
    monomial: Callable[[int], R]


def laurent_ring(*, half_power: bool = False) -> CoefficientRing[LaurentPoly]:
    """Exact Laurent polynomials in q or q^{1/2}."""
    return CoefficientRing(
        name=RING_LAURENT,
        one=LaurentPoly.one(half_power=half_power),
        zero=LaurentPoly.zero(half_power=half_power),
        monomial=lambda e: LaurentPoly.monomial(e, half_power=half_power),
    )


def jet_ring(order: int) -> CoefficientRing[MomentJet]:
    """Moment jets of the given order."""
    return CoefficientRing(
        name=RING_JET,
        one=MomentJet.one(order),
        zero=MomentJet.zero(order),
        monomial=lambda e: jet_of_exponent(e, order),
    )


INTEGER_RING: CoefficientRing[int] = CoefficientRing(
    name=RING_INTEGER, one=1, zero=0, monomial=lambda e: 1
)


@dataclass(frozen=True)
class TSeries(Generic[R]):
    """Power series in t truncated after t**n_max."""

    coeffs: tuple[R, ...]
    ring: str
    half_power: bool = False

    @property
    def n_max(self) -> int:
        """Highest power of t carried."""
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> R:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def restrict(self, n_max: int) -> TSeries[R]:
        """Drop every coefficient above t**n_max."""
        if n_max > self.n_max:
            raise ValueError(f"cannot restrict a series of order {self.n_max} to {n_max}")
        return TSeries(self.coeffs[: n_max + 1], self.ring, self.half_power)


def factor_exponent(delta: int, m: int, k: int) -> int:
    """q-exponent of the factor 1/(1 - q^e t^m) with index k."""
    return delta + 2 * k + 1 - m


def mul_geometric_factor(s: TSeries[R], w: R, m: int) -> TSeries[R]:
    """Multiply ``s`` by 1/(1 - w t**m), truncated at s.n_max."""
    if m < 1:
        raise ValueError(f"factor period must be at least 1, got {m}")
    coeffs: list[Any] = list(s.coeffs)
    for n in range(m, len(coeffs)):
        previous = coeffs[n - m]
        if previous:
            coeffs[n] = coeffs[n] + w * previous
    return TSeries(tuple(coeffs), s.ring, s.half_power)


def _expand_by_factors(delta: int, n_max: int, ring: CoefficientRing[R], half_power: bool) -> TSeries[R]:
    """Multiply the factors for periods 1..n_max in turn."""
    series: TSeries[R] = TSeries((ring.one,) + (ring.zero,) * n_max, ring.name, half_power)
    factors = 0
    for m in range(1, n_max + 1):
        for k in range(m):
            series = mul_geometric_factor(series, ring.monomial(factor_exponent(delta, m, k)), m)
            factors += 1
    _LOGGER.debug(
        "Expanded M_%s to t^%s over %s ring with %s factors", delta, n_max, ring.name, factors
    )
    return series


def expand_M_delta(
    delta: int,
    n_max: int,
    ring_mode: str = RING_LAURENT,
    *,
    order: int = DEFAULT_JET_ORDER,
    half_power: bool = False,
    method: str = METHOD_AUTO,
    cap: int | None = None,
) -> TSeries[Any] | FloatJetSeries:
    """Expand M_delta(t, q) to t**n_max over the requested ring.

    ``laurent`` gives the exact p_n(q); ``jet`` gives exact derivatives at
    q = 1 up to ``order``; ``float-jet`` gives the same in double precision
    for truncations beyond exact reach. A ``cap`` bounds n_max.
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    if half_power and ring_mode != RING_LAURENT:
        raise ValueError("half-power exponents are only meaningful for the laurent ring")
    if cap is not None and n_max > cap:
        raise ExpansionCapError(n_max, cap, ring_mode)

    if ring_mode == RING_LAURENT:
        return _expand_by_factors(delta, n_max, laurent_ring(half_power=half_power), half_power)
    if ring_mode == RING_JET:
        if method == METHOD_FACTORS or (method == METHOD_AUTO and n_max <= FACTOR_METHOD_MAX_N):
            return _expand_by_factors(delta, n_max, jet_ring(order), False)
        if method in (METHOD_AUTO, METHOD_LAYERS):
            return expand_moment_layers(delta, n_max, order)
        raise ValueError(f"unknown expansion method {method!r}")
    if ring_mode == RING_FLOAT_JET:
        return expand_float_jet(delta, n_max, order)
    if ring_mode == RING_INTEGER:
        return _expand_by_factors(delta, n_max, INTEGER_RING, False)
    raise ValueError(f"unknown ring mode {ring_mode!r}")


def _sigma2(n_max: int) -> list[int]:
    """sigma_2(n), the sum of squared divisors, for n <= n_max."""
    sigma = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        square = d * d
        for multiple in range(d, n_max + 1, d):
            sigma[multiple] += square
    return sigma


def _macmahon_integers(n_max: int) -> list[int]:
    """Exact p_n(1) from the divisor-sum recurrence."""
    # n p_n = sum_{r=1}^{n} sigma_2(r) p_{n-r}
    sigma = _sigma2(n_max)
    counts = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        counts[n] = sum(map(operator.mul, sigma[1 : n + 1], counts[n - 1 :: -1])) // n
    return counts


def expand_macmahon(n_max: int, ring_mode: str = RING_INTEGER) -> TSeries[Any]:
    """Plane-partition counts p_n(1) for n <= n_max."""
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    if ring_mode == RING_INTEGER:
        return TSeries(tuple(_macmahon_integers(n_max)), RING_INTEGER)
    if ring_mode == RING_FLOAT:
        sigma = np.asarray(_sigma2(n_max), dtype=np.float64)
        counts = np.zeros(n_max + 1)
        counts[0] = 1.0
        for n in range(1, n_max + 1):
            counts[n] = np.dot(sigma[1 : n + 1], counts[n - 1 :: -1]) / n
        if not np.all(np.isfinite(counts)):
            _LOGGER.warning("Float MacMahon expansion overflowed before t^%s", n_max)
        return TSeries(tuple(float(x) for x in counts), RING_FLOAT)
    raise ValueError(f"unknown ring mode {ring_mode!r} for the MacMahon series")


def expand_F2(n_max: int) -> TSeries[int]:
    """F_2(t) = (1/3) sum_m m(m^2 - 1) t^m / (1 - t^m)^2 as exact integers."""
    coeffs = [0] * (n_max + 1)
    for m in range(2, n_max + 1):
        weight = (m**3 - m) // 3
        for j, n in enumerate(range(m, n_max + 1, m), start=1):
            coeffs[n] += weight * j
    return TSeries(tuple(coeffs), RING_INTEGER)


def _convolve(a: Sequence[int], b: Sequence[int], n_max: int) -> list[int]:
    """Cauchy product of two integer sequences, truncated at n_max."""
    return [sum(map(operator.mul, a[: n + 1], b[n::-1])) for n in range(n_max + 1)]


def second_moment_series(n_max: int) -> TSeries[int]:
    """sum over plane partitions of (w+ - w-)^2, graded by size: F_2 * M."""
    f2 = expand_F2(n_max).coeffs
    counts = expand_macmahon(n_max).coeffs
    return TSeries(tuple(_convolve(f2, counts, n_max)), RING_INTEGER)


def _factor_power_sums(delta: int, n_max: int, order: int) -> list[list[int]]:
    """S[i][m] = sum_{k<m} (delta + 2k + 1 - m)**i for 1 <= i <= order."""
    sums = [[0] * (n_max + 1) for _ in range(order + 1)]
    # running sums of k**l over 0 <= k < m
    k_powers = [0] * (order + 1)
    for m in range(1, n_max + 1):
        last = m - 1
        power = 1
        for ell in range(order + 1):
            k_powers[ell] += power
            power *= last
        c = delta + 1 - m
        for i in range(1, order + 1):
            sums[i][m] = sum(
                math.comb(i, ell) * c ** (i - ell) * 2**ell * k_powers[ell] for ell in range(i + 1)
            )
    return sums


def _log_layers(delta: int, n_max: int, order: int) -> list[list[int]]:
    """[t^n] of the u-derivatives of log M_delta(t, e^u) at u = 0, orders 1..order."""
    sums = _factor_power_sums(delta, n_max, order)
    layers = [[0] * (n_max + 1) for _ in range(order + 1)]
    for m in range(1, n_max + 1):
        for i in range(1, order + 1):
            s = sums[i][m]
            if not s:
                continue
            row = layers[i]
            for j, n in enumerate(range(m, n_max + 1, m), start=1):
                row[n] += j ** (i - 1) * s
    return layers


def expand_moment_layers(delta: int, n_max: int, order: int = DEFAULT_JET_ORDER) -> TSeries[MomentJet]:
    """Exact jets of M_delta via derivative layers instead of factor products."""
    if order < 0:
        raise ValueError(f"jet order must be non-negative, got {order}")
    log_layers = _log_layers(delta, n_max, order)
    layers: list[list[int]] = [_macmahon_integers(n_max)]
    convolutions = 0
    for j in range(order):
        acc = [0] * (n_max + 1)
        for i in range(j + 1):
            left = log_layers[i + 1]
            right = layers[j - i]
            if not any(left) or not any(right):
                continue
            weight = math.comb(j, i)
            for n, value in enumerate(_convolve(left, right, n_max)):
                acc[n] += weight * value
            convolutions += 1
        layers.append(acc)
    _LOGGER.debug(
        "Expanded M_%s jets of order %s to t^%s with %s convolutions",
        delta,
        order,
        n_max,
        convolutions,
    )
    return TSeries(
        tuple(MomentJet(tuple(layer[n] for layer in layers)) for n in range(n_max + 1)),
        RING_JET,
    )


@dataclass(frozen=True, eq=False)
class FloatJetSeries:
    """Derivative layers of M_delta(t, e^u) in double precision.

    Column n is stored as a mantissa vector times exp(log_offset[n]), with
    the offset chosen so that ``layers[0, n] == 1``. Moment ratios at one n
    never see the offset.
    """

    layers: np.ndarray
    log_offset: np.ndarray
    delta: int

    @property
    def n_max(self) -> int:
        """Highest power of t carried."""
        return self.layers.shape[1] - 1

    @property
    def order(self) -> int:
        """Highest derivative carried."""
        return self.layers.shape[0] - 1

    def moment_ratio(self, n: int, k: int) -> float:
        """Approximate sum_pi s^k / p_n(1) at size n."""
        return float(self.layers[k, n] / self.layers[0, n])

    def log_count(self, n: int) -> float:
        """Natural log of p_n(1)."""
        return float(math.log(self.layers[0, n]) + self.log_offset[n])


def expand_float_jet(delta: int, n_max: int, order: int = DEFAULT_JET_ORDER) -> FloatJetSeries:
    """Float version of :func:`expand_moment_layers` with per-coefficient renormalization.

    Each new column is computed relative to the previous column's offset and
    then divided by its count, so mantissas stay near 1 for any n_max.
    """
    _LOGGER.warning(
        "float-jet expansion to t^%s is approximate (double precision, no exact integers)", n_max
    )
    sums = _factor_power_sums(delta, n_max, order)
    log_layers = np.zeros((order + 1, n_max + 1))
    for m in range(1, n_max + 1):
        js = np.arange(1, n_max // m + 1, dtype=np.float64)
        idx = m * np.arange(1, n_max // m + 1)
        for i in range(1, order + 1):
            if sums[i][m]:
                log_layers[i, idx] += js ** (i - 1) * float(sums[i][m])
    # (j, i, binomial) for the terms of layer j + 1 that are not identically zero
    terms = [(j, i, math.comb(j, i)) for j in range(order) for i in range(j + 1) if log_layers[i + 1].any()]

    sigma = np.asarray(_sigma2(n_max), dtype=np.float64)
    layers = np.zeros((order + 1, n_max + 1))
    layers[0, 0] = 1.0
    log_offset = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        # columns n-1 .. 0 rescaled to the offset of column n-1; log_layers[:, 0] is zero
        weights = np.exp(log_offset[n - 1 :: -1] - log_offset[n - 1])
        previous = layers[:, n - 1 :: -1] * weights
        column = np.zeros(order + 1)
        column[0] = np.dot(sigma[1 : n + 1], previous[0]) / n
        for j, i, binom in terms:
            column[j + 1] += binom * np.dot(log_layers[i + 1, 1 : n + 1], previous[j - i])
        head = column[0]
        layers[:, n] = column / head
        log_offset[n] = log_offset[n - 1] + math.log(head)

    if not np.all(np.isfinite(layers)):
        raise OverflowError(f"float-jet expansion left double range at n_max={n_max}")
    _LOGGER.debug("Float jets of M_%s to t^%s: log p_n_max = %s", delta, n_max, log_offset[-1])
    return FloatJetSeries(layers=layers, log_offset=log_offset, delta=delta)


def evaluate_real(series: TSeries[Any], t: float | str, *, dps: int = DEFAULT_MPMATH_DPS) -> Any:
    """sum_n a_n t^n for a scalar series at a real point, in mpmath precision."""
    with mp.workdps(dps):
        x = mp.mpf(t)
        return mp.fsum(mp.mpf(c) * x**n for n, c in enumerate(series.coeffs) if c)


def series_to_csv(series: TSeries[Any]) -> str:
    """Render a series as CSV: n, then the JSON Laurent polynomial or the jet entries."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    first = series.coeffs[0]
    if isinstance(first, LaurentPoly):
        writer.writerow(SERIES_LAURENT_COLUMNS)
        for n, coeff in enumerate(series.coeffs):
            writer.writerow([n, coeff.to_json()])
    elif isinstance(first, MomentJet):
        writer.writerow(["n", *(f"d{j}" for j in range(first.order + 1))])
        for n, jet in enumerate(series.coeffs):
            writer.writerow([n, *(str(x) for x in jet.coeffs)])
    else:
        writer.writerow(["n", "value"])
        for n, value in enumerate(series.coeffs):
            writer.writerow([n, value if isinstance(value, int) else format(value, ".17g")])
    return buffer.getvalue()
