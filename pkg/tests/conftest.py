import numpy as np
import pytest

from tangential.circle_sets import IntervalUnion

PI = np.pi


def random_union(rng, max_arcs=6):
    """A random arc union, including arcs that wrap past pi."""
    k = int(rng.integers(0, max_arcs + 1))
    lo = rng.uniform(-PI, PI, k)
    length = rng.exponential(0.6, k)
    return IntervalUnion(list(zip(lo, lo + length)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


GRID_N = 10**6
GRID = -PI + 2 * PI * (np.arange(GRID_N) + 0.5) / GRID_N
GRID_CELL = 2 * PI / GRID_N


def grid_mask(u):
    """Membership of the 10^6 cell midpoints, built from the arc list alone."""
    diff = np.zeros(GRID_N + 1, dtype=np.int64)
    np.add.at(diff, np.searchsorted(GRID, u.lo, side="left"), 1)
    np.add.at(diff, np.searchsorted(GRID, u.hi, side="left"), -1)
    return np.cumsum(diff[:-1]) > 0
