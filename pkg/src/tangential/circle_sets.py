"""Finite unions of arcs on the circle T = [-pi, pi).

Arcs are half-open ``[lo, hi)``. Every :class:`IntervalUnion` is kept in a
canonical form: arcs lie inside ``[-pi, pi)``, are sorted, pairwise disjoint
and separated by gaps wider than :data:`EPS`. An arc that crosses ``pi`` is
stored as two arcs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PI = math.pi
TWO_PI = 2.0 * math.pi

#: endpoints closer than this are treated as coincident
EPS = 1e-14


@dataclass(frozen=True)
class Arc:
    lo: float
    hi: float

    @property
    def length(self):
        return self.hi - self.lo


def reduce_angle(x):
    """Reduce angles to [-pi, pi). Works on scalars and arrays."""
    y = np.mod(np.asarray(x, dtype=float) + PI, TWO_PI) - PI
    # mod can round up to exactly 2*pi for tiny negative inputs
    y = np.where(y >= PI, y - TWO_PI, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def _merge(lo, hi):
    """Sort and merge arcs already inside [-pi, pi]."""
    keep = hi - lo > EPS
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return lo, hi
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    run_hi = np.maximum.accumulate(hi)
    # a new group starts where the arc begins beyond everything seen so far
    starts = np.ones(lo.size, dtype=bool)
    starts[1:] = lo[1:] > run_hi[:-1] + EPS
    start_idx = np.flatnonzero(starts)
    end_idx = np.append(start_idx[1:], lo.size) - 1
    return lo[start_idx], run_hi[end_idx]


def _normalize(lo, hi):
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    if lo.shape != hi.shape:
        raise ValueError("lo and hi must have the same length")
    if np.any(hi < lo):
        raise ValueError("arc with hi < lo")
    length = hi - lo
    if np.any(length >= TWO_PI):
        return np.array([-PI]), np.array([PI])
    lo0 = reduce_angle(lo)
    lo0 = np.atleast_1d(lo0)
    hi0 = lo0 + length
    wraps = hi0 > PI
    new_lo = np.concatenate([lo0, np.full(int(wraps.sum()), -PI)])
    new_hi = np.concatenate([np.minimum(hi0, PI), hi0[wraps] - TWO_PI])
    return _merge(new_lo, new_hi)


class IntervalUnion:
    """An immutable finite union of arcs.

    Construct from ``(lo, hi)`` pairs with any real angles; the pairs are
    wrapped onto [-pi, pi) and merged.
    """

    __slots__ = ("_lo", "_hi", "_measure")

    def __init__(self, pairs=()):
        pairs = list(pairs)
        if pairs:
            arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
            lo, hi = _normalize(arr[:, 0], arr[:, 1])
        else:
            lo, hi = np.empty(0), np.empty(0)
        self._set(lo, hi)

    def _set(self, lo, hi):
        lo = np.ascontiguousarray(lo, dtype=float)
        hi = np.ascontiguousarray(hi, dtype=float)
        lo.setflags(write=False)
        hi.setflags(write=False)
        self._lo = lo
        self._hi = hi
        self._measure = math.fsum((hi - lo).tolist())

    @classmethod
    def _from_canonical(cls, lo, hi):
        obj = cls.__new__(cls)
        obj._set(lo, hi)
        return obj

    @classmethod
    def from_arrays(cls, lo, hi):
        obj = cls.__new__(cls)
        obj._set(*_normalize(lo, hi))
        return obj

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def full(cls):
        return cls._from_canonical(np.array([-PI]), np.array([PI]))

    @property
    def lo(self):
        return self._lo

    @property
    def hi(self):
        return self._hi

    @property
    def arcs(self):
        return [Arc(float(a), float(b)) for a, b in zip(self._lo, self._hi)]

    @property
    def total_measure(self):
        return self._measure

    measure = total_measure

    def __len__(self):
        return self._lo.size

    def __bool__(self):
        return self._lo.size > 0

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return np.array_equal(self._lo, other._lo) and np.array_equal(self._hi, other._hi)

    def __hash__(self):
        return hash((self._lo.tobytes(), self._hi.tobytes()))

    def __repr__(self):
        if len(self) > 4:
            return f"IntervalUnion(<{len(self)} arcs>, measure={self._measure!r})"
        pairs = ", ".join(f"[{a!r}, {b!r})" for a, b in zip(self._lo, self._hi))
        return f"IntervalUnion({pairs})"

    def contains(self, x):
        """Membership test; ``x`` is reduced mod 2*pi first."""
        xr = np.atleast_1d(reduce_angle(x))
        idx = np.searchsorted(self._lo, xr, side="right") - 1
        inside = idx >= 0
        inside[inside] = xr[inside] < self._hi[idx[inside]]
        if np.ndim(x) == 0:
            return bool(inside[0])
        return inside

    def shift(self, s):
        return IntervalUnion.from_arrays(self._lo + s, self._hi + s)

    def complement(self):
        return subtract(IntervalUnion.full(), self)

    def to_json(self):
        return [[float(a), float(b)] for a, b in zip(self._lo, self._hi)]

    @classmethod
    def from_json(cls, data):
        arr = np.asarray(data, dtype=float).reshape(-1, 2)
        lo, hi = arr[:, 0], arr[:, 1]
        canonical = (np.all(lo >= -PI) and np.all(hi <= PI) and np.all(hi - lo > EPS)
                     and np.all(lo[1:] > hi[:-1] + EPS))
        if canonical:
            # stored output of to_json: load bit-for-bit
            return cls._from_canonical(lo.copy(), hi.copy())
        return cls(tuple(p) for p in data)

    __or__ = lambda self, other: union(self, other)
    __and__ = lambda self, other: intersect(self, other)
    __sub__ = lambda self, other: subtract(self, other)


def _segments(a, b):
    """Elementary segments between all endpoints, with membership flags."""
    pts = np.unique(np.concatenate([a.lo, a.hi, b.lo, b.hi]))
    if pts.size < 2:
        empty = np.empty(0)
        return empty, empty, empty.astype(bool), empty.astype(bool)
    left, right = pts[:-1], pts[1:]
    mid = 0.5 * (left + right)
    return left, right, a.contains(mid), b.contains(mid)


def _combine(a, b, op):
    left, right, in_a, in_b = _segments(a, b)
    sel = op(in_a, in_b)
    return IntervalUnion._from_canonical(*_merge(left[sel], right[sel]))


def union(a, b):
    return _combine(a, b, np.logical_or)


def intersect(a, b):
    return _combine(a, b, np.logical_and)


def subtract(a, b):
    return _combine(a, b, lambda x, y: x & ~y)


def sym_diff_measure(a, b):
    """Measure of the symmetric difference, in radians."""
    left, right, in_a, in_b = _segments(a, b)
    sel = in_a ^ in_b
    return math.fsum((right[sel] - left[sel]).tolist())


def comb_set(n, delta):
    """The comb U(n, delta): n arcs of width 2*pi*delta/n centred at 2*pi*j/n."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    n = int(n)
    j = np.arange(n)
    m = np.where(2 * j <= n, j, j - n)
    centers = TWO_PI * m / n
    half = PI * delta / n
    return IntervalUnion.from_arrays(centers - half, centers + half)
