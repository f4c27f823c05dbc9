"""The operator Phi_r(x, f) = int phi_r(x - t) f(t) dt on the circle.

Indicators of arc unions are handled exactly through interval masses, which
keeps radii as close as 1 - 1e-12 usable. Complex boundary functions (finite
Blaschke products) go through certified adaptive quadrature.
"""
from __future__ import annotations

import math

import numpy as np

from . import quadrature
from .circle_sets import reduce_angle
from .counterexamples import product_eval
from .errors import QuadratureError
from .kernels import _breakpoints, _check_r

PI = math.pi
TWO_PI = 2.0 * math.pi

#: the complex path refuses radii with 1 - r below this
COMPLEX_MIN_GAP = 1e-10
#: smallest tolerance the complex path will try to certify
COMPLEX_MIN_TOL = 1e-10
#: most comb anchors placed as breakpoints before falling back to pure adaptivity
MAX_ANCHORS = 2**21


def phi_indicator(kernel, r, x, E):
    """Phi_r(x, 1_E) as the sum over arcs (a, b) of E of mass(x - b, x - a)."""
    _check_r(r)
    if len(E) == 0:
        return 0.0
    lo = x - np.asarray(E.hi, dtype=float)
    hi = x - np.asarray(E.lo, dtype=float)
    if kernel.has_primitive:
        f_lo = np.atleast_1d(kernel.primitive(r, lo))
        f_hi = np.atleast_1d(kernel.primitive(r, hi))
        total = math.fsum((f_hi - f_lo).tolist())
    else:
        total = math.fsum(kernel.mass(r, a, b) for a, b in zip(lo.tolist(), hi.tolist()))
    return min(max(total, 0.0), 1.0)


def phi_indicator_grid(kernel, rs, x, E):
    """phi_indicator over a list of radii."""
    return [phi_indicator(kernel, r, x, E) for r in rs]


def _anchors(B, x):
    """t = x - pi m / n for every factor: comb centres and midpoints of B, seen from x."""
    pts = []
    count = 0
    for f in B.factors:
        count += 2 * f.n
        if count > MAX_ANCHORS:
            break
        m = np.arange(2 * f.n)
        t = reduce_angle(x - PI * m / f.n)
        pts.append(np.atleast_1d(t))
    return np.concatenate(pts) if pts else np.empty(0)


def phi_complex(kernel, r, x, B, tol=1e-8, max_panels=quadrature.DEFAULT_MAX_PANELS):
    """Phi_r(x, B) for a finite Blaschke product B, with certified absolute error <= tol.

    Panels are seeded at the kernel peak (graded at scale 1 - r) and at the
    comb points of every factor. Radii with 1 - r < 1e-10 are refused.
    Raises :class:`QuadratureError` when the panel budget runs out.
    """
    s = _check_r(r)
    if not 0.0 < r < 1.0:
        raise ValueError("phi_complex needs 0 < r < 1")
    if s < COMPLEX_MIN_GAP:
        raise QuadratureError(
            f"1 - r = {s:.3e} is below {COMPLEX_MIN_GAP:g}; the complex path does not certify such radii",
            estimate=float("nan"), error=float("inf"))
    if tol < COMPLEX_MIN_TOL:
        raise ValueError(f"tol must be >= {COMPLEX_MIN_TOL:g}")
    if not B.factors:
        return 1.0 + 0.0j

    anchors = _anchors(B, x)
    pts = np.concatenate([_breakpoints(kernel, s, -PI, PI), anchors[(anchors > -PI) & (anchors < PI)]])

    def integrand(t):
        return kernel.density(r, t) * product_eval(B, x - t)

    value, _, _ = quadrature.integrate(integrand, pts, tol=tol, max_panels=max_panels, is_complex=True)
    return complex(value)
