"""Refined Donaldson-Thomas invariants of C^3 through plane partitions."""

from __future__ import annotations

from .const import VERSION

__version__ = VERSION
