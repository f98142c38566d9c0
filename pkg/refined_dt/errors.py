"""Exception hierarchy for the refined DT toolkit."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "AcceptanceCollapseError",
    "CapViolationError",
    "DegenerateDistributionError",
    "EnumerationCapError",
    "ExpansionCapError",
    "JetOrderError",
    "OracleMismatchError",
    "OrderMismatchError",
    "PmfUnavailableError",
    "RefinedDTError",
    "SizeSummary",
]


class RefinedDTError(Exception):
    """Base class for every error raised by the library."""


class OrderMismatchError(RefinedDTError):
    """Two jets of different orders were combined."""

    def __init__(self, left: int, right: int) -> None:
        super().__init__(f"jet orders differ: {left} != {right}")
        self.left = left
        self.right = right


class JetOrderError(RefinedDTError):
    """A moment was requested beyond the order carried by a jet."""

    def __init__(self, order: int, k: int) -> None:
        super().__init__(f"jet of order {order} cannot supply moment k={k}")
        self.order = order
        self.k = k


class CapViolationError(RefinedDTError):
    """A size bound configured for an exact computation was exceeded."""


class EnumerationCapError(CapViolationError):
    """Brute-force enumeration was asked for a size above its cap."""

    def __init__(self, n: int, cap: int) -> None:
        super().__init__(
            f"refusing to enumerate plane partitions of size {n}: the cap is {cap} "
            "(counts grow past 10^5 there; use the expansion engine instead)"
        )
        self.n = n
        self.cap = cap


class ExpansionCapError(CapViolationError):
    """An exact expansion was asked for a truncation above its cap."""

    def __init__(self, n_max: int, cap: int, ring_mode: str) -> None:
        super().__init__(f"{ring_mode} expansion to t^{n_max} exceeds the cap {cap}")
        self.n_max = n_max
        self.cap = cap
        self.ring_mode = ring_mode


class PmfUnavailableError(RefinedDTError):
    """A distribution was requested from a source that only carries moments."""


class DegenerateDistributionError(RefinedDTError):
    """A distribution table cannot be standardized."""


class OracleMismatchError(RefinedDTError):
    """Expansion and enumeration disagree."""

    def __init__(self, n: int, delta: int, exponent: int, expected: int, actual: int) -> None:
        super().__init__(
            f"n={n} delta={delta}: coefficient of q^{exponent} is {actual}, oracle says {expected}"
        )
        self.n = n
        self.delta = delta
        self.exponent = exponent
        self.expected = expected
        self.actual = actual


@dataclass(frozen=True)
class SizeSummary:
    """Empirical size distribution seen by a sampler run."""

    attempts: int
    mean: float
    std: float
    minimum: int
    maximum: int

    def __str__(self) -> str:
        return (
            f"attempts={self.attempts} mean={self.mean:.6g} std={self.std:.6g} "
            f"min={self.minimum} max={self.maximum}"
        )


class AcceptanceCollapseError(RefinedDTError):
    """The sampler exhausted its attempt budget before collecting enough records."""

    def __init__(self, n: int, accepted: int, summary: SizeSummary) -> None:
        super().__init__(
            f"acceptance collapsed for n={n}: {accepted} accepted; observed sizes {summary}"
        )
        self.n = n
        self.accepted = accepted
        self.summary = summary
