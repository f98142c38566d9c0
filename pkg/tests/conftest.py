"""Fixtures for refined DT tests."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import pytest

from refined_dt.partitions import PlanePartition, parse_partition
from refined_dt.store import SeriesStore

FIXTURES = Path(__file__).parent / "fixtures"

# plane-partition counts p_0 .. p_20
PLANE_PARTITION_COUNTS = (
    1, 1, 3, 6, 13, 24, 48, 86, 160, 282, 500,
    859, 1479, 2485, 4167, 6879, 11297, 18334, 29601, 47330, 75278,
)  # fmt: skip

# n -> (count, sum s^2, sum s^4, sum s^6, sum w0, sum w0^2) with s = w+ - w-
ORACLE_SUMS = {
    1: (1, 0, 0, 0, 1, 1),
    2: (3, 2, 2, 2, 4, 6),
    3: (6, 10, 34, 130, 10, 20),
    4: (13, 38, 230, 1718, 26, 62),
    5: (24, 100, 940, 11500, 56, 156),
    6: (48, 278, 3638, 62438, 126, 390),
    8: (160, 1444, 30988, 907324, 512, 1908),
    10: (500, 6320, 195800, 8464760, 1866, 8020),
    12: (1479, 24548, 1020452, 60151748, 6258, 30216),
}


@pytest.fixture
def store() -> SeriesStore:
    """Return a fresh series store."""
    return SeriesStore()


@pytest.fixture
def golden_partitions() -> Callable[[int], list[str]]:
    """Return a loader for the stored partition lists."""

    def load(n: int) -> list[str]:
        text = (FIXTURES / f"partitions_n{n}.txt").read_text(encoding="utf-8")
        return text.split("\n")[:-1]

    return load


@pytest.fixture
def figure_partition() -> PlanePartition:
    """Return a size-35 partition with trace 10."""
    return parse_partition("5,3,2,1,1;4,3,2,1;3,3,2;2,2,1")
