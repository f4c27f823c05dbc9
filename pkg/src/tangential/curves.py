"""Approach curves r -> lambda(r) and their inversion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError

CURVE_FAMILIES = ("power", "loglinear", "linear")

SCAN_POINTS = 1024


@dataclass(frozen=True)
class ApproachCurve:
    """lambda(r) for one of three parametric families.

    power      c (1 - r)^alpha, 0 < alpha <= 1
    loglinear  c (1 - r) log(e / (1 - r))
    linear     c (1 - r)

    All three are continuous on [0, 1], vanish only at r = 1 and are
    strictly decreasing on [0, 1), so ``r0 == 0``.
    """

    family: str
    c: float = 1.0
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in CURVE_FAMILIES:
            raise ValueError(f"unknown curve family {self.family!r}")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.family == "power":
            if self.alpha is None or not 0.0 < self.alpha <= 1.0:
                raise ValueError("power curve needs 0 < alpha <= 1")

    @property
    def r0(self):
        return 0.0

    def to_dict(self):
        d = {"family": self.family, "c": self.c}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], float(data.get("c", 1.0)),
                   None if data.get("alpha") is None else float(data["alpha"]))

    def of_gap(self, s):
        """lambda as a function of the gap s = 1 - r."""
        s = np.asarray(s, dtype=float)
        if self.family == "power":
            out = self.c * s ** self.alpha
        elif self.family == "linear":
            out = self.c * s
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(s > 0, self.c * s * (1.0 - np.log(np.where(s > 0, s, 1.0))), 0.0)
        return out if out.ndim else float(out)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any((r < 0) | (r > 1)):
            raise ValueError("r must lie in [0, 1]")
        return self.of_gap(1.0 - r)

    eval = __call__

    def tangency_ratio(self, r):
        if np.any(np.asarray(r) >= 1):
            raise ValueError("tangency_ratio needs r < 1")
        return self(r) / (1.0 - np.asarray(r, dtype=float))


def tangency_report(curve, levels=range(1, 41)):
    """lambda(r) / (1 - r) on r = 1 - 2^-i, the tangency diagnostic grid."""
    return [(1.0 - 2.0 ** -i, float(curve.tangency_ratio(1.0 - 2.0 ** -i))) for i in levels]


def _bisect(g, lo, hi, glo):
    # g(lo) and g(hi) have opposite signs (or one is zero); stop at float resolution
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid, mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return lo, hi


def solve_radius(curve, target, lo, hi):
    """r in [lo, hi] with lambda(r) = target.

    Bisection to float resolution; the endpoint with the smaller residual is
    returned. If the endpoints do not bracket the target, a scan of
    ``SCAN_POINTS`` points looks for a bracketing pair. Raises
    :class:`BracketError` when none exists.
    """
    if not lo < hi:
        raise ValueError("solve_radius needs lo < hi")

    def g(r):
        return float(curve(r)) - target

    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        grid = np.linspace(lo, hi, SCAN_POINTS + 1)
        vals = np.asarray(curve(grid)) - target
        sign_change = np.flatnonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))
        if sign_change.size == 0:
            raise BracketError(
                f"lambda does not take the value {target!r} on [{lo!r}, {hi!r}]")
        i = int(sign_change[0])
        lo, hi, glo = float(grid[i]), float(grid[i + 1]), float(vals[i])
        if glo == 0.0:
            return lo
    a, b = _bisect(g, lo, hi, glo)
    return a if abs(g(a)) <= abs(g(b)) else b
