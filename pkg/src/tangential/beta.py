"""Finite-grid estimate of the concentration index

    beta = limsup_{delta -> 0} liminf_{r -> 1} mass_r(-delta lambda(r), delta lambda(r)).

liminf over r is replaced by the minimum over the tail half of a radius grid
approaching 1, limsup over delta by the maximum over the supplied delta grid.
Every intermediate value is kept so non-stabilization is visible.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .kernels import R_MAX

DEFAULT_DELTAS = tuple(2.0 ** -i for i in range(1, 13))


def default_r_grid(first=4, last=40):
    """r_i = 1 - 2^-i, with values beyond the radius cap replaced by the cap."""
    out = []
    for i in range(first, last + 1):
        r = min(1.0 - 2.0 ** -i, R_MAX)
        if not out or r > out[-1]:
            out.append(r)
    return out


@dataclass
class BetaEstimate:
    value: float
    delta_grid: list
    inner_liminf: list
    r_grid: list
    r_grid_spec: str
    table: list = field(default_factory=list, repr=False)  # rows (delta, r, inner_mass)

    def to_json(self):
        d = asdict(self)
        d.pop("table")
        return d


def inner_mass(kernel, curve, delta, r):
    """Kernel mass of the window (-delta lambda(r), delta lambda(r)), clipped to the circle."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    w = min(delta * float(curve(r)), math.pi)
    return kernel.mass(r, -w, w)


def estimate_beta(kernel, curve, deltas=DEFAULT_DELTAS, r_grid=None):
    deltas = [float(d) for d in deltas]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    if r_grid is None:
        r_grid = default_r_grid()
        spec = "r_i = 1 - 2^-i, i = 4..40, capped at 1 - 1e-12"
    else:
        r_grid = [float(r) for r in r_grid]
        spec = f"user grid of {len(r_grid)} radii in [{r_grid[0]!r}, {r_grid[-1]!r}]"
    tail = r_grid[len(r_grid) // 2:]

    table = []
    liminf = []
    for d in deltas:
        vals = [inner_mass(kernel, curve, d, r) for r in r_grid]
        table.extend((d, r, v) for r, v in zip(r_grid, vals))
        liminf.append(min(vals[len(r_grid) // 2:]))
    return BetaEstimate(value=max(liminf), delta_grid=deltas, inner_liminf=liminf,
                        r_grid=list(r_grid), r_grid_spec=spec + f"; liminf over the last {len(tail)}",
                        table=table)
