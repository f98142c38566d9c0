"""Coefficient rings: exact Laurent polynomials in q and moment jets.

A :class:`LaurentPoly` is the exact coefficient p_n(q) of the t-expansion.
A :class:`MomentJet` of order K keeps only the power sums
``sum_e c_e * e**j`` for ``j <= K``, which are the derivatives
``(q d/dq)**j`` evaluated at q = 1. Multiplying jets is the binomial
convolution of those derivative vectors (the product rule), so the jet map
is a ring homomorphism and moments can be expanded without ever building
the full Laurent polynomial.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

from .errors import OrderMismatchError

__all__ = [
    "LaurentPoly",
    "MomentJet",
    "derivative_at_one",
    "jet_add",
    "jet_mul",
    "jet_of_exponent",
    "jet_of_laurent",
    "laurent_add",
    "laurent_mul",
    "mirror",
    "sum_jets",
]


class LaurentPoly:
    """Finitely supported map from q-exponents to integer coefficients.

    Stored in canonical form: zero coefficients are never kept. When
    ``half_power`` is set the exponents count powers of q^{1/2}.
    """

    __slots__ = ("_terms", "_half_power")

    def __init__(self, terms: Mapping[int, int] | None = None, *, half_power: bool = False) -> None:
        self._terms: dict[int, int] = (
            {int(e): int(c) for e, c in terms.items() if c} if terms else {}
        )
        self._half_power = half_power

    @classmethod
    def _from_canonical(cls, terms: dict[int, int], half_power: bool) -> LaurentPoly:
        """Wrap a dict already free of zero coefficients without copying it."""
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._half_power = half_power
        return poly

    @classmethod
    def one(cls, *, half_power: bool = False) -> LaurentPoly:
        """The constant 1."""
        return cls._from_canonical({0: 1}, half_power)

    @classmethod
    def zero(cls, *, half_power: bool = False) -> LaurentPoly:
        """The zero polynomial."""
        return cls._from_canonical({}, half_power)

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1, *, half_power: bool = False) -> LaurentPoly:
        """coefficient * q**exponent."""
        return cls._from_canonical({exponent: coefficient} if coefficient else {}, half_power)

    @property
    def terms(self) -> Mapping[int, int]:
        """Read-only view of the exponent -> coefficient map."""
        return MappingProxyType(self._terms)

    @property
    def half_power(self) -> bool:
        """Whether exponents count powers of q^{1/2}."""
        return self._half_power

    def items(self) -> Iterator[tuple[int, int]]:
        """Yield (exponent, coefficient) pairs by ascending exponent."""
        for exponent in sorted(self._terms):
            yield exponent, self._terms[exponent]

    def coefficient(self, exponent: int) -> int:
        """Coefficient of q**exponent, zero when absent."""
        return self._terms.get(exponent, 0)

    def is_zero(self) -> bool:
        """Whether every coefficient vanishes."""
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def support(self) -> tuple[int, ...]:
        """Exponents with non-zero coefficients, ascending."""
        return tuple(sorted(self._terms))

    def evaluate(self, q: float) -> float:
        """Numeric value at q (in the polynomial's own exponent unit)."""
        if q == 1:
            return float(sum(self._terms.values()))
        return math.fsum(c * q**e for e, c in self._terms.items())

    def _check_unit(self, other: LaurentPoly) -> None:
        """Refuse to mix q and q^{1/2} exponents."""
        if self.half_power != other.half_power:
            raise ValueError("cannot combine q and q^{1/2} exponent units")

    def __add__(self, other: object) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return laurent_add(self, other)

    def __mul__(self, other: object) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return laurent_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.half_power == other.half_power and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.half_power, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"LaurentPoly({dict(self.items())!r}, half_power={self.half_power})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exponent, coeff in self.items():
            if exponent == 0:
                parts.append(str(coeff))
                continue
            if self.half_power:
                power = str(exponent // 2) if exponent % 2 == 0 else f"{exponent}/2"
            else:
                power = str(exponent)
            monomial = "q" if power == "1" else f"q^{power}"
            parts.append(monomial if coeff == 1 else f"{coeff}*{monomial}")
        return " + ".join(parts)

    def to_json(self) -> str:
        """Sorted array of [exponent, "coefficient"] pairs."""
        return json.dumps([[e, str(c)] for e, c in self.items()], separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, *, half_power: bool = False) -> LaurentPoly:
        """Inverse of :meth:`to_json`."""
        pairs = json.loads(text)
        return cls({int(e): int(c) for e, c in pairs}, half_power=half_power)


def laurent_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact sum in canonical form."""
    a._check_unit(b)
    if len(a._terms) < len(b._terms):
        a, b = b, a
    terms = dict(a._terms)
    for exponent, coeff in b._terms.items():
        value = terms.get(exponent, 0) + coeff
        if value:
            terms[exponent] = value
        else:
            terms.pop(exponent, None)
    return LaurentPoly._from_canonical(terms, a.half_power)


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact product in canonical form."""
    a._check_unit(b)
    if len(a._terms) < len(b._terms):
        a, b = b, a
    if len(b._terms) == 1:
        # monomial: a shift and a scale, no cancellation possible
        ((shift, scale),) = b._terms.items()
        return LaurentPoly._from_canonical(
            {e + shift: c * scale for e, c in a._terms.items()}, a.half_power
        )
    terms: dict[int, int] = {}
    for ea, ca in a._terms.items():
        for eb, cb in b._terms.items():
            exponent = ea + eb
            terms[exponent] = terms.get(exponent, 0) + ca * cb
    return LaurentPoly._from_canonical({e: c for e, c in terms.items() if c}, a.half_power)


def mirror(a: LaurentPoly) -> LaurentPoly:
    """Substitute q -> 1/q."""
    return LaurentPoly._from_canonical({-e: c for e, c in a._terms.items()}, a.half_power)


def derivative_at_one(a: LaurentPoly, k: int) -> int:
    """Return (q d/dq)^k a evaluated at q = 1, i.e. sum of coeff * exponent**k."""
    if k < 0:
        raise ValueError(f"derivative order must be non-negative, got {k}")
    if k == 0:
        return sum(a._terms.values())
    return sum(c * e**k for e, c in a._terms.items())


@lru_cache(maxsize=64)
def _binomial_rows(order: int) -> tuple[tuple[int, ...], ...]:
    """Pascal rows 0..order."""
    return tuple(tuple(math.comb(j, i) for i in range(j + 1)) for j in range(order + 1))


@dataclass(frozen=True, slots=True)
class MomentJet:
    """Derivative vector of a Laurent polynomial at q = 1, truncated at order K.

    ``coeffs[j]`` equals ``sum_e c_e * e**j``.
    """

    coeffs: tuple[int, ...]

    @property
    def order(self) -> int:
        """Highest derivative carried."""
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order: int) -> MomentJet:
        """Jet of the constant 1."""
        return cls((1,) + (0,) * order)

    @classmethod
    def zero(cls, order: int) -> MomentJet:
        """Jet of the zero polynomial."""
        return cls((0,) * (order + 1))

    def __getitem__(self, j: int) -> int:
        return self.coeffs[j]

    def __add__(self, other: object) -> MomentJet:
        if not isinstance(other, MomentJet):
            return NotImplemented
        return jet_add(self, other)

    def __mul__(self, other: object) -> MomentJet:
        if not isinstance(other, MomentJet):
            return NotImplemented
        return jet_mul(self, other)

    def is_zero(self) -> bool:
        """Whether every coefficient vanishes."""
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)


def jet_of_exponent(e: int, order: int) -> MomentJet:
    """Jet image of the monomial q**e: the powers e**0 .. e**order."""
    if order < 0:
        raise ValueError(f"jet order must be non-negative, got {order}")
    powers = [1] * (order + 1)
    for j in range(1, order + 1):
        powers[j] = powers[j - 1] * e
    return MomentJet(tuple(powers))


def jet_of_laurent(a: LaurentPoly, order: int) -> MomentJet:
    """The jet map: derivatives 0..order of ``a`` at q = 1."""
    return MomentJet(tuple(derivative_at_one(a, j) for j in range(order + 1)))


def jet_add(a: MomentJet, b: MomentJet) -> MomentJet:
    """Entrywise sum of two jets of the same order."""
    if len(a.coeffs) != len(b.coeffs):
        raise OrderMismatchError(a.order, b.order)
    return MomentJet(tuple(x + y for x, y in zip(a.coeffs, b.coeffs, strict=True)))


def jet_mul(a: MomentJet, b: MomentJet) -> MomentJet:
    """Product rule for (q d/dq)^j: binomially weighted convolution."""
    if len(a.coeffs) != len(b.coeffs):
        raise OrderMismatchError(a.order, b.order)
    x, y = a.coeffs, b.coeffs
    rows = _binomial_rows(len(x) - 1)
    return MomentJet(
        tuple(
            sum(binom * x[i] * y[j - i] for i, binom in enumerate(rows[j]))
            for j in range(len(x))
        )
    )


def sum_jets(jets: Iterable[MomentJet], order: int) -> MomentJet:
    """Entrywise sum of an iterable of jets."""
    total = [0] * (order + 1)
    for jet in jets:
        if jet.order != order:
            raise OrderMismatchError(order, jet.order)
        for j, value in enumerate(jet.coeffs):
            total[j] += value
    return MomentJet(tuple(total))
