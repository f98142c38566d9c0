"""Closed-form asymptotics and the constants they are built from.

Everything here is a pure function of n (or of a real radius) and a few
zeta values. Exact big integers are only compared against these formulas
in log space, see :func:`log_of_int`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from mpmath import mp

from .const import DEFAULT_MPMATH_DPS

_LOGGER = logging.getLogger(__name__)

__all__ = [
    "CONSTANTS",
    "Constants",
    "constants_dict",
    "double_factorial",
    "f2_identity_check",
    "f2_mellin_approx",
    "independent_constants",
    "km_params",
    "log_abs_macmahon",
    "log_of_int",
    "major_arc_M",
    "minor_arc_log_bound",
    "moment_asym",
    "saddle_N",
    "theorem1_params",
    "wick_leading",
    "wright_pn",
    "wright_rate",
]


@dataclass(frozen=True)
class Constants:
    """Special values entering the limit laws and Wright's formula."""

    zeta2: float
    zeta3: float
    zeta_prime_minus1: float
    euler_gamma: float

    @classmethod
    def from_mpmath(cls, dps: int = DEFAULT_MPMATH_DPS) -> Constants:
        """Evaluate every constant with mpmath at ``dps`` digits."""
        with mp.workdps(dps):
            return cls(
                zeta2=float(mp.zeta(2)),
                zeta3=float(mp.zeta(3)),
                zeta_prime_minus1=float(mp.zeta(-1, 1, 1)),
                euler_gamma=float(mp.euler),
            )


CONSTANTS = Constants.from_mpmath()


def double_factorial(m: int) -> int:
    """m!! with the convention (-1)!! = 0!! = 1."""
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def theorem1_params(delta: int) -> tuple[float, float]:
    """Mean and variance of the Gaussian limit of (delta*w0 + w+ - w-)/n^{2/3}."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    scale = 2.0 * CONSTANTS.zeta3
    mu = delta * CONSTANTS.zeta2 / scale ** (2.0 / 3.0)
    sigma2 = 1.0 / scale ** (1.0 / 3.0)
    return mu, sigma2


def km_params() -> tuple[float, float]:
    """Centre a and spread b of the trace limit law w0/n^{2/3}."""
    scale = 2.0 * CONSTANTS.zeta3
    a = CONSTANTS.zeta2 / scale ** (2.0 / 3.0)
    b = math.sqrt(1.0 / 3.0) / scale ** (1.0 / 3.0)
    return a, b


def wright_rate() -> float:
    """Coefficient of n^{2/3} in log p_n: 3 (zeta(3)/4)^{1/3}."""
    return 3.0 * (CONSTANTS.zeta3 / 4.0) ** (1.0 / 3.0)


def wright_pn(n: int | float, log_scale: bool = False) -> float:
    """Wright's asymptotic for the number of plane partitions of n.

    zeta(3)^{7/36} 2^{-11/36} (3 pi)^{-1/2} n^{-25/36}
    * exp(3 (zeta(3)/4)^{1/3} n^{2/3} + zeta'(-1)).
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    log_value = (
        (7.0 / 36.0) * math.log(CONSTANTS.zeta3)
        - (11.0 / 36.0) * math.log(2.0)
        - 0.5 * math.log(3.0 * math.pi)
        - (25.0 / 36.0) * math.log(n)
        + wright_rate() * n ** (2.0 / 3.0)
        + CONSTANTS.zeta_prime_minus1
    )
    return log_value if log_scale else math.exp(log_value)


def moment_asym(n: int | float, k: int, log_scale: bool = False) -> float:
    """Predicted (q d/dq)^k p_n at q = 1 for large n.

    Odd k predicts exactly 0 (log scale: -inf).
    """
    if k < 0:
        raise ValueError(f"moment order must be non-negative, got {k}")
    if k % 2:
        return -math.inf if log_scale else 0
    log_value = (
        (2.0 * k / 3.0) * math.log(n)
        + math.log(double_factorial(k - 1))
        - (k / 6.0) * math.log(2.0 * CONSTANTS.zeta3)
        + wright_pn(n, log_scale=True)
    )
    return log_value if log_scale else math.exp(log_value)


def saddle_N(n: float) -> float:
    """Saddle radius N = (n / (2 zeta(3)))^{1/3}, so that n = 2 zeta(3) N^3."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    return (n / (2.0 * CONSTANTS.zeta3)) ** (1.0 / 3.0)


def f2_mellin_approx(y: float, include_subleading: bool = False) -> float:
    """Leading behaviour of F_2(e^{-y}) as y -> 0+: 2 zeta(3) y^{-4}.

    The y^{-2} term -2 gamma Gamma(2) zeta(-1)/3 comes from a double pole
    whose bookkeeping is not settled; it is only added on request.
    """
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    value = 2.0 * CONSTANTS.zeta3 * y**-4
    if include_subleading:
        _LOGGER.warning("F_2 subleading Mellin term is experimental")
        zeta_minus1 = -1.0 / 12.0
        value += -2.0 * CONSTANTS.euler_gamma * math.gamma(2) * zeta_minus1 / 3.0 * y**-2
    return value


def major_arc_M(y: float, log_scale: bool = False) -> float:
    """Major-arc model e^{zeta'(-1)} y^{1/12} e^{zeta(3)/y^2} of M(e^{-y})."""
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    log_value = CONSTANTS.zeta3 / y**2 + math.log(y) / 12.0 + CONSTANTS.zeta_prime_minus1
    return log_value if log_scale else math.exp(log_value)


def minor_arc_log_bound(N: float, eps: float) -> float:
    """Exponent (zeta(3) - 1/2 + eps) N^2 bounding log|M| off the major arc."""
    return (CONSTANTS.zeta3 - 0.5 + eps) * N**2


def log_abs_macmahon(t: complex, tail: float = 1e-18) -> float:
    """log|M(t)| = -sum_m m log|1 - t^m| for |t| < 1."""
    radius = abs(t)
    if not radius < 1:
        raise ValueError(f"|t| must be below 1, got {radius}")
    m_max = max(1, math.ceil(math.log(tail) / math.log(radius)))
    m = np.arange(1, m_max + 1)
    return float(-np.sum(m * np.log(np.abs(1.0 - np.power(complex(t), m)))))


def f2_identity_check(m: int) -> bool:
    """sum_{k<m} (1 + 2k - m)^2 == m(m^2 - 1)/3, in exact integers."""
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    return 3 * sum((1 + 2 * k - m) ** 2 for k in range(m)) == m * (m * m - 1)


def wick_leading(k: int, f2: float) -> float:
    """Pairing prediction (k-1)!! F_2^{k/2} for the leading part of F_k, k even."""
    if k % 2:
        return 0.0
    return double_factorial(k - 1) * f2 ** (k // 2)


def log_of_int(x: int) -> float:
    """Natural log of a positive integer of any size.

    Keeps the top 64 bits as the mantissa and adds the rest as a multiple
    of log 2.
    """
    if x <= 0:
        raise ValueError(f"log_of_int needs a positive integer, got {x}")
    shift = max(x.bit_length() - 64, 0)
    return math.log(x >> shift) + shift * math.log(2.0)


def _richardson(values: Sequence[Any], ratio: float = 4) -> Any:
    """Eliminate successive error terms c_j h^j with h shrinking by ``ratio``."""
    table = list(values)
    factor = ratio
    while len(table) > 1:
        table = [(factor * b - a) / (factor - 1) for a, b in zip(table, table[1:], strict=False)]
        factor *= ratio
    return table[0]


def _limit_by_doubling(f: Callable[[int], Any], n0: int, levels: int) -> Any:
    """Richardson limit of f(n0), f(2 n0), ... with errors in powers of 1/n^2."""
    # error expansions below are in powers of 1/n^2, so doubling n shrinks h by 4
    return _richardson([f(n0 * 2**j) for j in range(levels)], ratio=4)


def independent_constants(dps: int = DEFAULT_MPMATH_DPS) -> dict[str, float]:
    """Recompute the constants without mpmath's zeta routines.

    zeta(2) and zeta(3) come from central-binomial series, gamma and the
    Glaisher-Kinkelin constant A from their defining limits (Richardson
    extrapolated), and zeta'(-1) = 1/12 - log A.
    """
    with mp.workdps(dps):
        terms = 80
        zeta2 = 3 * mp.fsum(1 / (mp.mpf(n) ** 2 * mp.binomial(2 * n, n)) for n in range(1, terms))
        zeta3 = mp.mpf(5) / 2 * mp.fsum(
            (-1) ** (n + 1) / (mp.mpf(n) ** 3 * mp.binomial(2 * n, n)) for n in range(1, terms)
        )

        def log_glaisher_approx(n: int) -> Any:
            """log A from the truncated sum of k log k."""
            head = mp.fsum(k * mp.log(k) for k in range(2, n + 1))
            return head - (mp.mpf(n) ** 2 / 2 + mp.mpf(n) / 2 + mp.mpf(1) / 12) * mp.log(n) + mp.mpf(n) ** 2 / 4

        def gamma_approx(n: int) -> Any:
            """Euler gamma from a harmonic partial sum."""
            harmonic = mp.fsum(mp.mpf(1) / k for k in range(1, n + 1))
            return harmonic - mp.log(n) - mp.mpf(1) / (2 * n)

        log_a = _limit_by_doubling(log_glaisher_approx, 128, 5)
        gamma = _limit_by_doubling(gamma_approx, 128, 5)
        return {
            "zeta2": float(zeta2),
            "zeta3": float(zeta3),
            "euler_gamma": float(gamma),
            "glaisher": float(mp.exp(log_a)),
            "zeta_prime_minus1": float(mp.mpf(1) / 12 - log_a),
        }


def constants_dict() -> dict[str, float]:
    """Every constant and derived parameter, keyed for the JSON dump."""
    a, b = km_params()
    _, sigma2 = theorem1_params(0)
    values: dict[str, float] = dict(asdict(CONSTANTS))
    for delta in (0, 1, 3):
        values[f"mu_delta_{delta}"] = theorem1_params(delta)[0]
    values["sigma2"] = sigma2
    values["km_a"] = a
    values["km_b"] = b
    values["wright_rate"] = wright_rate()
    values["f2_leading"] = 2.0 * CONSTANTS.zeta3
    values["gauss_m4"] = 3.0 * sigma2**2
    return values
