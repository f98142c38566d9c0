"""Brute-force plane partitions: the ground truth every expansion is checked against."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .const import DEFAULT_ENUMERATION_CAP
from .errors import EnumerationCapError
from .qseries import LaurentPoly

_LOGGER = logging.getLogger(__name__)

__all__ = [
    "PlanePartition",
    "StatTriple",
    "enumerate_plane_partitions",
    "format_partition",
    "is_plane_partition",
    "joint_moment_oracle",
    "parse_partition",
    "refined_poly_oracle",
    "stat_triples",
    "stats",
    "trace_moment_oracle",
    "transpose",
]

Rows = tuple[tuple[int, ...], ...]


def is_plane_partition(rows: Sequence[Sequence[int]]) -> bool:
    """Positive entries, weakly decreasing along rows and down columns, no empty rows."""
    previous: Sequence[int] | None = None
    for row in rows:
        if not row:
            return False
        if previous is not None and len(row) > len(previous):
            return False
        for j, value in enumerate(row):
            if not isinstance(value, int) or value < 1:
                return False
            if j and value > row[j - 1]:
                return False
            if previous is not None and value > previous[j]:
                return False
        previous = row
    return True


@dataclass(frozen=True)
class StatTriple:
    """Diagonal, above-diagonal and below-diagonal mass of a plane partition."""

    w0: int
    w_plus: int
    w_minus: int

    @property
    def size(self) -> int:
        """Number of boxes."""
        return self.w0 + self.w_plus + self.w_minus

    @property
    def stat(self) -> int:
        """w+ - w-, the q-exponent of the unrefined weight."""
        return self.w_plus - self.w_minus

    def exponent(self, delta: int) -> int:
        """q-exponent delta*w0 + w+ - w- of the refined weight."""
        return delta * self.w0 + self.w_plus - self.w_minus


@dataclass(frozen=True)
class PlanePartition:
    """Ragged array of positive integers, rows and columns weakly decreasing."""

    rows: Rows = ()

    def __post_init__(self) -> None:
        """Validate the rows."""
        rows = tuple(tuple(row) for row in self.rows)
        if not is_plane_partition(rows):
            raise ValueError(f"not a plane partition: {rows!r}")
        object.__setattr__(self, "rows", rows)

    @cached_property
    def size(self) -> int:
        """Number of boxes."""
        return sum(map(sum, self.rows))

    def __str__(self) -> str:
        return format_partition(self)


def stats(p: PlanePartition) -> StatTriple:
    """Split |p| into its trace, above-diagonal and below-diagonal parts."""
    w0 = w_plus = w_minus = 0
    for i, row in enumerate(p.rows):
        for j, value in enumerate(row):
            if i == j:
                w0 += value
            elif i < j:
                w_plus += value
            else:
                w_minus += value
    return StatTriple(w0, w_plus, w_minus)


def transpose(p: PlanePartition) -> PlanePartition:
    """Reflect in the diagonal."""
    if not p.rows:
        return p
    return PlanePartition(
        tuple(tuple(row[j] for row in p.rows if len(row) > j) for j in range(len(p.rows[0])))
    )


def format_partition(p: PlanePartition) -> str:
    """Rows joined by ';', entries by ','; the empty partition is ''."""
    return ";".join(",".join(map(str, row)) for row in p.rows)


def parse_partition(line: str) -> PlanePartition:
    """Read rows written by :func:`format_partition`."""
    text = line.strip()
    if not text:
        return PlanePartition()
    try:
        rows = tuple(tuple(int(entry) for entry in row.split(",")) for row in text.split(";"))
    except ValueError as err:
        raise ValueError(f"malformed partition line {line!r}") from err
    return PlanePartition(rows)


def _extend_row(remaining: int, bound: tuple[int, ...] | None, done: Rows, row: tuple[int, ...]) -> Iterator[Rows]:
    """Yield completions of ``done`` using rows bounded by ``bound``."""
    j = len(row)
    limit = remaining
    if bound is not None:
        if j >= len(bound):
            return
        limit = min(limit, bound[j])
    if row:
        limit = min(limit, row[-1])
    for value in range(limit, 0, -1):
        current = row + (value,)
        left = remaining - value
        # longer rows first, then this row closed
        yield from _extend_row(left, bound, done, current)
        if left == 0:
            yield done + (current,)
        else:
            yield from _extend_row(left, current, done + (current,), ())


def enumerate_plane_partitions(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[PlanePartition]:
    """Every plane partition of size n exactly once, in a fixed depth-first order.

    Rows are generated top to bottom; each entry runs from its largest
    admissible value down to 1, and a row is extended before it is closed.
    """
    if n < 0:
        raise ValueError(f"size must be non-negative, got {n}")
    if n > cap:
        raise EnumerationCapError(n, cap)
    if n == 0:
        return iter((PlanePartition(),))
    return (PlanePartition(rows) for rows in _extend_row(n, None, (), ()))


@lru_cache(maxsize=32)
def stat_triples(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[StatTriple, ...]:
    """Statistics of every partition of size n, in enumeration order."""
    triples = tuple(stats(p) for p in enumerate_plane_partitions(n, cap))
    _LOGGER.debug("Enumerated %s plane partitions of size %s", len(triples), n)
    return triples


def refined_poly_oracle(
    n: int, delta: int, *, half_power: bool = False, cap: int = DEFAULT_ENUMERATION_CAP
) -> LaurentPoly:
    """sum over partitions of size n of q^(delta*w0 + w+ - w-)."""
    exponents = Counter(triple.exponent(delta) for triple in stat_triples(n, cap))
    return LaurentPoly(exponents, half_power=half_power)


def joint_moment_oracle(n: int, i: int, j: int, *, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """sum over partitions of size n of w0^i * (w+ - w-)^j."""
    if i < 0 or j < 0:
        raise ValueError(f"moment orders must be non-negative, got ({i}, {j})")
    return sum(t.w0**i * t.stat**j for t in stat_triples(n, cap))


def trace_moment_oracle(n: int, i: int, *, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """sum over partitions of size n of w0^i."""
    return joint_moment_oracle(n, i, 0, cap=cap)
