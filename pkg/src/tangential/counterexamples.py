"""The two divergence-forcing objects.

* the alternating sets E_1, ..., E_K built from comb sets
  U_k = U(n_k, 5 delta_k): E_1 = U_1, then remove U_k for even k and add it
  for odd k;
* finite Blaschke products B_K = b_1 ... b_K on the unit circle, where
  b(n, delta, z) = (z^n - q) / (q z^n - 1) with q = rho^n = exp(-sqrt(delta)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle_sets import IntervalUnion, comb_set, reduce_angle, subtract, union
from .trig import reduce_multiple

PI = math.pi
TWO_PI = 2.0 * math.pi

#: constant of both Blaschke factor bounds, from |b + 1| <= 8 e pi delta / sqrt(delta)
LEMMA_CONSTANT = 8.0 * math.e * math.pi
#: validity cap: the denominator pi delta^(1/4) / 2 - 2 sqrt(delta) stays >= pi delta^(1/4) / 4
LEMMA_DELTA_CAP = (math.pi / 8.0) ** 4
#: largest sample grid modulus_of_continuity allocates before using the Lipschitz bound
MAX_GRID_POINTS = 2 ** 22


@dataclass
class SetSequence:
    schedule: object
    combs: list
    sets: list

    @property
    def final(self):
        return self.sets[-1]

    def to_json(self):
        return {
            "combs": [u.to_json() for u in self.combs],
            "sets": [e.to_json() for e in self.sets],
        }


def build_sets(schedule):
    if schedule.variant != "theorem1":
        raise ValueError("build_sets needs a theorem1 schedule")
    combs, sets = [], []
    for entry in schedule.entries:
        u = comb_set(entry.n, 5.0 * entry.delta)
        combs.append(u)
        if entry.k == 1:
            e = u
        elif entry.k % 2 == 0:
            e = subtract(sets[-1], u)
        else:
            e = union(sets[-1], u)
        sets.append(e)
    return SetSequence(schedule, combs, sets)


@dataclass(frozen=True)
class BlaschkeFactor:
    n: int
    delta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not 0.0 < self.delta <= LEMMA_DELTA_CAP:
            raise ValueError(f"delta must lie in (0, (pi/8)^4], got {self.delta!r}")

    @property
    def rho(self):
        return math.exp(-math.sqrt(self.delta) / self.n)

    @property
    def q(self):
        """rho ** n = exp(-sqrt(delta))."""
        return math.exp(-math.sqrt(self.delta))

    @property
    def one_minus_q(self):
        return -math.expm1(-math.sqrt(self.delta))

    @property
    def derivative_bound(self):
        """sup over the circle of |d b / dx| = n (1 + q) / (1 - q)."""
        return self.n * (1.0 + self.q) / self.one_minus_q

    def __call__(self, x):
        return factor_eval(self, x)

    def to_json(self):
        return {"n": int(self.n), "delta": self.delta}


def factor_eval(f, x):
    """b(n, delta, e^{ix}) with n x reduced exactly modulo 2 pi."""
    theta = reduce_multiple(f.n, reduce_angle(x))
    theta = np.asarray(theta, dtype=float)
    half = np.sin(0.5 * theta)
    w_minus_1 = -2.0 * half * half + 1j * np.sin(theta)
    d = f.one_minus_q
    # (w - q) / (q w - 1) written around w = 1 to keep the -1 at comb centres exact
    out = (w_minus_1 + d) / (f.q * w_minus_1 - d)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BlaschkeProduct:
    factors: tuple = field(default_factory=tuple)

    @property
    def K(self):
        return len(self.factors)

    def truncate(self, k):
        """B_k: the product of the first k factors."""
        return BlaschkeProduct(tuple(self.factors[:k]))

    def append(self, factor):
        return BlaschkeProduct(tuple(self.factors) + (factor,))

    @property
    def derivative_bound(self):
        return sum(f.derivative_bound for f in self.factors)

    def __call__(self, x):
        return product_eval(self, x)

    def to_json(self):
        return {"factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(BlaschkeFactor(int(f["n"]), float(f["delta"])) for f in data["factors"]))


def product_eval(B, x):
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape, dtype=complex)
    for f in B.factors:
        out = out * factor_eval(f, x)
    return out if out.ndim else complex(out)


def _theta_eval(f, theta):
    """b(n, delta) at any x with n x = theta (mod 2 pi); the value does not depend on n."""
    return factor_eval(BlaschkeFactor(1, f.delta), np.asarray(theta, dtype=float))


def plus_deviation(n, delta, width, grid_density=64):
    """max |b(n, delta) + 1| over a grid of U(n, width).

    b depends on x only through n x mod 2 pi, so one arc of the comb,
    sampled in theta = n x, covers all n of them.
    """
    f = BlaschkeFactor(n, delta)
    theta = np.linspace(-PI * width, PI * width, grid_density)
    return float(np.max(np.abs(_theta_eval(f, theta) + 1.0)))


def minus_deviation(n, delta, width, grid_density=64):
    """max |b(n, delta) - 1| over a grid of the complement of U(n, width)."""
    f = BlaschkeFactor(n, delta)
    if width >= 1.0:
        return 0.0
    side = np.linspace(PI * width, PI, grid_density)
    theta = np.concatenate([-side[::-1], side])
    return float(np.max(np.abs(_theta_eval(f, theta) - 1.0)))


def verify_lemma1(n, delta, grid_density=64):
    """Grid check of |b + 1| <= C sqrt(delta) on U(n, delta) and
    |b - 1| <= C delta^(1/4) off U(n, delta^(1/4)), with C = 8 e pi."""
    if not 0.0 < delta <= LEMMA_DELTA_CAP:
        raise ValueError(f"delta must lie in (0, (pi/8)^4 = {LEMMA_DELTA_CAP:.6g}], got {delta!r}")
    f = BlaschkeFactor(n, delta)
    plus = plus_deviation(n, delta, delta, grid_density)
    minus = minus_deviation(n, delta, delta ** 0.25, grid_density)
    # comb centres are the points with n x = 0 and midpoints those with n x = pi (mod 2 pi);
    # a float x = 2 pi j / n misses them by about ulp(x), which b amplifies by n (1 + q) / (1 - q)
    center_dev = abs(_theta_eval(f, 0.0) + 1.0)
    mid_dev = abs(_theta_eval(f, -PI) - 1.0)
    bound_plus = LEMMA_CONSTANT * math.sqrt(delta)
    bound_minus = LEMMA_CONSTANT * delta ** 0.25
    return {
        "n": int(n),
        "delta": delta,
        "grid_density": grid_density,
        "max_plus_dev": plus,
        "max_minus_dev": minus,
        "bound_plus": bound_plus,
        "bound_minus": bound_minus,
        "ratio_plus": plus / math.sqrt(delta),
        "ratio_minus": minus / delta ** 0.25,
        "center_dev": center_dev,
        "midpoint_dev": mid_dev,
        "passed": plus <= bound_plus and minus <= bound_minus,
    }


def modulus_of_continuity(B, h, grid_density=16, grid_points=None):
    """Upper estimate of sup_{|x - x'| < h} |B(x) - B(x')|.

    B is sampled on a uniform grid of spacing g <= h / grid_density; pairs
    of grid points up to h + g apart are compared and the result is inflated
    by g * sup|B'|, which covers points between grid nodes. When that grid
    would exceed ``MAX_GRID_POINTS``, or when the Lipschitz bound h * sup|B'|
    is already smaller, the Lipschitz bound is returned instead.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if not B.factors:
        return 0.0
    lipschitz = min(h * B.derivative_bound, 2.0)
    if grid_points is None:
        grid_points = int(math.ceil(TWO_PI * grid_density / h))
    if grid_points > MAX_GRID_POINTS:
        return lipschitz
    g = TWO_PI / grid_points
    x = -PI + g * np.arange(grid_points)
    vals = product_eval(B, x)
    max_offset = min(int(math.floor((h + g) / g)), grid_points // 2)
    best = 0.0
    for d in range(1, max_offset + 1):
        best = max(best, float(np.max(np.abs(np.roll(vals, -d) - vals))))
    return min(best + g * B.derivative_bound, lipschitz)
