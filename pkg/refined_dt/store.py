"""Shared cache of expanded series."""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable
from typing import Any

from .const import DEFAULT_JET_ORDER, RING_FLOAT_JET, RING_INTEGER, RING_JET, RING_LAURENT
from .expand import FloatJetSeries, TSeries, expand_float_jet, expand_M_delta, expand_macmahon
from .qseries import LaurentPoly, MomentJet

_LOGGER = logging.getLogger(__name__)

__all__ = ["SeriesStore", "default_store"]


class SeriesStore:
    """Class to own, cache and grow expanded series.

    A request for a larger truncation than the cached one re-expands and
    replaces the entry; smaller requests are served from the cache.
    """

    def __init__(self, expander: Callable[..., Any] = expand_M_delta) -> None:
        """Initialize the store."""
        self._expander = expander
        # guards the dicts only; builds run under the per-key lock
        self._lock = threading.Lock()
        self._key_locks: dict[tuple[Any, ...], threading.Lock] = {}
        self._series: dict[tuple[Any, ...], TSeries[Any]] = {}
        self._float_jets: dict[tuple[int, int, int], FloatJetSeries] = {}
        self.expansions = 0

    def _key_lock(self, key: tuple[Any, ...]) -> threading.Lock:
        """Lock serializing builds of one cache entry."""
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def _get_or_grow(self, key: tuple[Any, ...], n_max: int, build: Callable[[], TSeries[Any]]) -> TSeries[Any]:
        """Serve ``key`` from the cache or build it, one build per key at a time."""
        with self._key_lock(key):
            with self._lock:
                cached = self._series.get(key)
            if cached is not None and cached.n_max >= n_max:
                _LOGGER.debug("Cache hit for %s up to t^%s", key, n_max)
                return cached
            _LOGGER.debug("Expanding %s to t^%s", key, n_max)
            series = build()
            with self._lock:
                self.expansions += 1
                self._series[key] = series
            return series

    def laurent_series(self, n_max: int, delta: int, *, half_power: bool = False) -> TSeries[LaurentPoly]:
        """Get exact Laurent coefficients of M_delta through t^n_max."""
        return self._get_or_grow(
            (RING_LAURENT, delta, half_power),
            n_max,
            lambda: self._expander(delta, n_max, RING_LAURENT, half_power=half_power),
        )

    def jet_series(self, n_max: int, delta: int, order: int = DEFAULT_JET_ORDER) -> TSeries[MomentJet]:
        """Get exact moment jets of M_delta through t^n_max."""
        return self._get_or_grow(
            (RING_JET, delta, order),
            n_max,
            lambda: self._expander(delta, n_max, RING_JET, order=order),
        )

    def count_series(self, n_max: int) -> TSeries[int]:
        """Get plane-partition counts through t^n_max."""
        return self._get_or_grow((RING_INTEGER,), n_max, lambda: expand_macmahon(n_max))

    def float_jet(self, n_max: int, delta: int, order: int = DEFAULT_JET_ORDER) -> FloatJetSeries:
        """Get the rescaled float layers; these are tied to their n_max."""
        key = (delta, order, n_max)
        with self._key_lock((RING_FLOAT_JET, *key)):
            with self._lock:
                cached = self._float_jets.get(key)
            if cached is not None:
                return cached
            series = expand_float_jet(delta, n_max, order)
            with self._lock:
                self.expansions += 1
                self._float_jets[key] = series
            return series

    def laurent(self, n: int, delta: int, *, half_power: bool = False) -> LaurentPoly:
        """Get p_n(q) for M_delta."""
        return self.laurent_series(n, delta, half_power=half_power)[n]

    def jet(self, n: int, delta: int, order: int = DEFAULT_JET_ORDER) -> MomentJet:
        """Get the moment jet of p_n(q) for M_delta."""
        return self.jet_series(n, delta, order)[n]

    def count(self, n: int) -> int:
        """Get the number of plane partitions of size n."""
        return self.count_series(n)[n]

    def clear(self) -> None:
        """Drop every cached series."""
        with self._lock:
            self._series.clear()
            self._float_jets.clear()


_DEFAULT_STORE = SeriesStore()


def default_store() -> SeriesStore:
    """Process-wide store used when a caller does not pass one."""
    return _DEFAULT_STORE
