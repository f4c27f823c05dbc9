"""Kernel families phi_r on the circle.

Every family is a probability density on [-pi, pi) for each 0 < r < 1,
concentrating at t = 0 as r -> 1. Radii are handled through the gap
``s = 1 - r``, which is exact in floating point for r >= 1/2.

Families
--------
poisson
    P_r(t) = (1 - r^2) / (2 pi (1 - 2 r cos t + r^2)); closed-form primitive.
sqrt_poisson
    c(r) * sqrt(P_r(t)) with c(r) from the complete elliptic integral K;
    interval masses by adaptive quadrature.
box
    uniform on (-(1 - r), 1 - r); exact piecewise-linear primitive.
fejer
    (1 / (2 pi N)) (sin(N t / 2) / sin(t / 2))^2 with N = ceil(1 / (1 - r));
    primitive from the Fourier series with an Abel-summed tail.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import quadrature
from .errors import QuadratureError
from .trig import reduce_multiple

PI = math.pi
TWO_PI = 2.0 * math.pi

#: largest radius accepted; beyond it the Poisson closed form has no precision left
R_MAX = 1.0 - 1e-12

FAMILIES = ("poisson", "sqrt_poisson", "box", "fejer")
UNIMODAL = frozenset({"poisson", "sqrt_poisson", "box"})

MASS_TOL = 1e-11
_FEJER_ABEL_MIN = 40.0


def _check_r(r):
    if not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {r!r}")
    if r > R_MAX:
        raise ValueError(f"radius {r!r} exceeds the cap 1 - 1e-12")
    return 1.0 - r


def _wrap(t):
    """Split t into (t0, m) with t = t0 + 2 pi m and t0 in [-pi, pi)."""
    t = np.asarray(t, dtype=float)
    m = np.floor((t + PI) / TWO_PI)
    t0 = t - m * TWO_PI
    # guard the rounding at the seam
    hi = t0 >= PI
    t0 = np.where(hi, t0 - TWO_PI, t0)
    m = np.where(hi, m + 1, m)
    lo = t0 < -PI
    t0 = np.where(lo, t0 + TWO_PI, t0)
    m = np.where(lo, m - 1, m)
    return t0, m


@dataclass(frozen=True)
class Kernel:
    family: str
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")

    # -- descriptors -----------------------------------------------------

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], dict(data.get("params") or {}))

    @property
    def unimodal(self):
        return self.family in UNIMODAL

    @property
    def has_primitive(self):
        return self.family != "sqrt_poisson"

    # -- pointwise -------------------------------------------------------

    def density(self, r, t):
        s = _check_r(r)
        t0, _ = _wrap(t)
        if self.family == "poisson":
            out = _poisson_density(s, t0)
        elif self.family == "sqrt_poisson":
            out = _sqrt_poisson_norm(s) * np.sqrt(_poisson_density(s, t0))
        elif self.family == "box":
            out = np.where(np.abs(t0) < s, 0.5 / s, 0.0)
        else:
            out = _fejer_density(fejer_order(s), t0)
        return out if np.ndim(out) else float(out)

    def primitive(self, r, t):
        """A continuous primitive F with F(t + 2 pi) = F(t) + 1 and F(0) = 0."""
        s = _check_r(r)
        t0, m = _wrap(t)
        if self.family == "poisson":
            half = 0.5 * t0
            g = np.arctan2(((2.0 - s) / s) * np.sin(half), np.cos(half)) / PI
        elif self.family == "box":
            g = np.clip(t0, -s, s) / (2.0 * s)
        elif self.family == "fejer":
            g = _fejer_primitive(fejer_order(s), t0)
        else:
            raise NotImplementedError("sqrt_poisson has no closed-form primitive; use mass()")
        out = g + m
        return out if np.ndim(out) else float(out)

    # -- integrals -------------------------------------------------------

    def mass(self, r, a, b, tol=MASS_TOL):
        """Kernel mass of the interval [a, b], with 0 <= b - a <= 2 pi."""
        if b < a:
            raise ValueError(f"mass needs a <= b, got [{a!r}, {b!r}]")
        if b - a > TWO_PI * (1 + 1e-15):
            raise ValueError("interval longer than the circle")
        if b == a:
            _check_r(r)
            return 0.0
        if self.has_primitive:
            fa, fb = self.primitive(r, np.array([a, b], dtype=float))
            return float(fb - fa)
        return quad_mass(self, r, a, b, tol=tol)

    def worst_mass(self, r, m):
        """Largest mass carried by any set of measure m."""
        if not 0.0 <= m:
            raise ValueError("measure must be nonnegative")
        if m >= TWO_PI:
            _check_r(r)
            return 1.0
        if m == 0.0:
            _check_r(r)
            return 0.0
        if self.unimodal:
            return min(1.0, self.mass(r, -0.5 * m, 0.5 * m))
        return _sorted_grid_worst_mass(self, r, m)


# -- family internals -----------------------------------------------------


def _poisson_density(s, t):
    r = 1.0 - s
    sin_half = np.sin(0.5 * np.asarray(t, dtype=float))
    return s * (2.0 - s) / (TWO_PI * (s * s + 4.0 * r * sin_half * sin_half))


@functools.lru_cache(maxsize=4096)
def _sqrt_poisson_norm(s):
    # int_T dt / |1 - r e^{it}| = 4 K(m) / (1 + r),  m = 4r / (1 + r)^2,  1 - m = s^2 / (2 - s)^2
    r = 1.0 - s
    p = (s / (2.0 - s)) ** 2
    integral = math.sqrt(s * (2.0 - s) / TWO_PI) * 4.0 * special.ellipkm1(p) / (1.0 + r)
    return 1.0 / integral


#: largest Fejer order whose phases N t / 2 the exact reduction can handle
FEJER_MAX_ORDER = 2**27


def fejer_order(s):
    n = int(math.ceil(1.0 / s))
    if n > FEJER_MAX_ORDER:
        raise ValueError(f"Fejer order {n} exceeds {FEJER_MAX_ORDER}; use 1 - r >= {1.0 / FEJER_MAX_ORDER:.3g}")
    return n


def _fejer_density(n, t):
    t = np.asarray(t, dtype=float)
    num = np.sin(reduce_multiple(n, 0.5 * t))
    den = np.sin(0.5 * t)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(den == 0.0, float(n), num / np.where(den == 0.0, 1.0, den))
    return ratio * ratio / (TWO_PI * n)


def _fejer_primitive(n, t0):
    """Odd primitive of the normalized Fejer kernel on [-pi, pi)."""
    t0 = np.atleast_1d(np.asarray(t0, dtype=float))
    tau = np.abs(t0)
    out = np.empty_like(tau)
    x = 2.0 * n * np.sin(0.5 * tau)
    far = x >= _FEJER_ABEL_MIN
    if np.any(far):
        out[far] = _fejer_primitive_far(n, tau[far])
    near = ~far
    for i in np.flatnonzero(near):
        out[i] = _fejer_primitive_near(n, tau[i])
    out = np.where(t0 < 0, -out, out)
    # F(-pi) must be exactly -1/2 so the periodic extension is continuous
    out = np.where(t0 == -PI, -0.5, out)
    return out


def _fejer_primitive_near(n, tau):
    if tau == 0.0:
        return 0.0
    step = PI / (2.0 * n)
    k = max(1, int(math.ceil(tau / step)))
    edges = np.linspace(0.0, tau, k + 1)
    nodes, weights = np.polynomial.legendre.leggauss(20)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes).ravel()
    y = _fejer_density(n, x).reshape(k, -1)
    return float(np.sum(half * (y @ weights)))


def _fejer_primitive_far(n, tau):
    # G(tau) = 1/2 - (R(tau) + C(tau)/n) / pi, where
    #   C(tau) = sum_{j<n} sin(j tau)   (closed form),
    #   R(tau) = Im sum_{j>=n} e^{ij tau} / j   (Abel summation by parts).
    half = 0.5 * tau
    c = np.sin(reduce_multiple(n - 1, half)) * np.sin(reduce_multiple(n, half)) / np.sin(half)
    one_minus_z = 2.0 * np.sin(half) ** 2 - 1j * np.sin(tau)
    z = np.exp(1j * tau)
    w = z / one_minus_z
    abs_w = np.abs(w)
    zn = np.exp(1j * reduce_multiple(n, tau))
    total = np.zeros_like(w)
    # term_m = (-w)^m * m! / (n (n+1) ... (n+m))
    term = np.full_like(w, 1.0 / n)
    bound_coef = np.ones_like(tau)  # |w|^p (p-1)! / (n ... (n+p-1))
    for p in range(1, 200):
        total = total + term
        bound_coef = bound_coef * abs_w * (p - 1 if p > 1 else 1) / (n + p - 1)
        if np.all(bound_coef < 1e-18):
            break
        term = term * (-w) * p / (n + p)
    else:
        raise QuadratureError("Fejer tail series did not converge")
    tail = zn / one_minus_z * total
    return 0.5 - (tail.imag + c / n) / PI


# -- quadrature paths -------------------------------------------------------


def _breakpoints(kernel, s, a, b):
    pts = [np.array([a, b])]
    first = math.ceil((a - PI) / TWO_PI)
    last = math.floor((b + PI) / TWO_PI)
    for m in range(first, last + 1):
        center = TWO_PI * m
        lo, hi = max(a, center - PI), min(b, center + PI)
        if lo >= hi:
            continue
        pts.append(np.array([lo, hi]))
        pts.append(quadrature.graded_points(center, s, lo, hi))
        if kernel.family == "box":
            pts.append(np.clip(np.array([center - s, center + s]), a, b))
        elif kernel.family == "fejer":
            n = fejer_order(s)
            if n > 2**16:
                raise QuadratureError(f"Fejer order {n} too large for lobe-resolved quadrature")
            lobes = center + TWO_PI * np.arange(-n, n + 1) / n
            pts.append(lobes[(lobes > lo) & (lobes < hi)])
    return np.concatenate(pts)


def quad_mass(kernel, r, a, b, tol=MASS_TOL, max_panels=quadrature.DEFAULT_MAX_PANELS):
    """Interval mass by adaptive quadrature of the density (no primitive used)."""
    s = _check_r(r)
    if b < a:
        raise ValueError("quad_mass needs a <= b")
    if b == a:
        return 0.0
    value, _, _ = quadrature.integrate(
        lambda t: kernel.density(r, t), _breakpoints(kernel, s, a, b), tol=tol, max_panels=max_panels)
    return float(value)


_GRID_MIN = 2**20
_GRID_MAX = 2**24


def _sorted_grid_worst_mass(kernel, r, m):
    """Greedy fill of measure m by the largest density values on a uniform grid."""
    s = _check_r(r)
    size = _GRID_MIN
    if kernel.family == "fejer":
        size = max(size, 64 * fejer_order(s))
    if size > _GRID_MAX:
        raise QuadratureError(f"grid of {size} points needed for worst_mass; limit is {_GRID_MAX}")
    h = TWO_PI / size
    t = -PI + h * (np.arange(size) + 0.5)
    vals = np.sort(np.asarray(kernel.density(r, t)))[::-1]
    whole = int(m // h)
    frac = m / h - whole
    total = vals[:whole].sum() * h
    if whole < size:
        total += frac * h * vals[whole]
    return float(min(total, 1.0))


# -- module-level operations -----------------------------------------------


def density(kernel, r, t):
    return kernel.density(r, t)


def mass(kernel, r, a, b):
    return kernel.mass(r, a, b)


def worst_mass(kernel, r, m):
    return kernel.worst_mass(r, m)


def radius_grid(tau):
    """Radii tau, 1 - 2(1 - tau), 1 - 4(1 - tau), ... down to r > 0."""
    s = 1.0 - tau
    out = []
    while s < 1.0:
        out.append(1.0 - s)
        s *= 2.0
    return out


def sup_worst_mass(kernel, tau, m):
    """max over 0 < r <= tau of worst_mass, on the geometric radius grid."""
    return max(kernel.worst_mass(r, m) for r in radius_grid(tau))


def abs_continuity_threshold(kernel, eps, tau):
    """Largest m (found by bisection) with sup_{r <= tau} worst_mass(r, m) < eps."""
    if eps >= 1.0:
        raise ValueError("eps >= 1 makes the absolute-continuity condition vacuous")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    lo, hi = 0.0, TWO_PI
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sup_worst_mass(kernel, tau, mid) < eps:
            lo = mid
        else:
            hi = mid
    if lo <= 1e-15:
        raise ValueError(f"no positive measure above 1e-15 certifies eps={eps!r} at tau={tau!r}")
    return lo
