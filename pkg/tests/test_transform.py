import math

import numpy as np
import pytest

from conftest import random_union
from tangential.circle_sets import IntervalUnion, comb_set, subtract, union
from tangential.counterexamples import BlaschkeFactor, BlaschkeProduct
from tangential.errors import QuadratureError
from tangential.kernels import FAMILIES, Kernel
from tangential.transform import phi_complex, phi_indicator

PI = math.pi
POISSON = Kernel("poisson")


def riemann(kernel, r, x, E, n=10**6):
    """Midpoint sum of the density, each cell weighted by the fraction of it covered by E.

    The covered fraction comes from the cumulative measure of the arc list,
    so arc endpoints inside a cell cost no accuracy.
    """
    h = 2 * PI / n
    edges = -PI + h * np.arange(n + 1)
    cum = np.zeros(n + 1)
    for lo, hi in zip(E.lo, E.hi):
        cum += np.clip(edges - lo, 0.0, hi - lo)
    cover = np.diff(cum)
    t = edges[:-1] + 0.5 * h
    return float(np.sum(kernel.density(r, x - t) * cover))


@pytest.mark.parametrize("family", FAMILIES)
def test_full_and_empty(family):
    k = Kernel(family)
    assert phi_indicator(k, 0.99, 0.3, IntervalUnion.full()) == pytest.approx(1.0, abs=1e-12)
    assert phi_indicator(k, 0.99, 0.3, IntervalUnion.empty()) == 0.0


def test_riemann_oracle(rng):
    for _ in range(10):
        E = random_union(rng)
        x = rng.uniform(-PI, PI)
        want = riemann(POISSON, 0.99, x, E)
        assert phi_indicator(POISSON, 0.99, x, E) == pytest.approx(want, abs=1e-6)


def test_complementarity_and_range(rng):
    for family in ("poisson", "box", "fejer"):
        k = Kernel(family)
        for _ in range(20):
            E = random_union(rng)
            x = rng.uniform(-PI, PI)
            r = 1 - 10 ** rng.uniform(-8 if family == "fejer" else -10, -1)
            v = phi_indicator(k, r, x, E)
            assert 0 <= v <= 1
            assert v + phi_indicator(k, r, x, E.complement()) == pytest.approx(1, abs=1e-9)


def test_translation_covariance(rng):
    for _ in range(50):
        E = random_union(rng)
        x, s = rng.uniform(-PI, PI, 2)
        a = phi_indicator(POISSON, 0.999, x + s, E.shift(s))
        assert a == pytest.approx(phi_indicator(POISSON, 0.999, x, E), abs=1e-10)


def test_disjoint_additivity(rng):
    for _ in range(50):
        E1 = random_union(rng)
        E2 = subtract(random_union(rng), E1)
        x = rng.uniform(-PI, PI)
        total = phi_indicator(POISSON, 0.99, x, union(E1, E2))
        parts = phi_indicator(POISSON, 0.99, x, E1) + phi_indicator(POISSON, 0.99, x, E2)
        assert total == pytest.approx(parts, abs=1e-10)


def test_fejer_order_limit():
    with pytest.raises(ValueError):
        phi_indicator(Kernel("fejer"), 1 - 1e-10, 0.0, IntervalUnion([(0, 1)]))


def test_extreme_radius_on_comb():
    # centred on a comb arc much wider than 1 - r: essentially all mass inside
    U = comb_set(1000, 0.01)
    assert phi_indicator(POISSON, 1 - 1e-10, 0.0, U) > 1 - 1e-5
    assert phi_indicator(POISSON, 1 - 1e-10, PI / 1000, U) < 1e-5


def test_sqrt_poisson_uses_quadrature():
    E = IntervalUnion([(-0.1, 0.2)])
    k = Kernel("sqrt_poisson")
    want = riemann(k, 0.9, 0.05, E)
    assert phi_indicator(k, 0.9, 0.05, E) == pytest.approx(want, abs=1e-6)


def test_complex_empty_product():
    for x in (0.0, 1.0, -3.0):
        assert phi_complex(POISSON, 0.999, x, BlaschkeProduct()) == 1


def test_complex_bounded(rng):
    B = BlaschkeProduct((BlaschkeFactor(7, 1e-3), BlaschkeFactor(300, 1e-5)))
    for x in rng.uniform(-PI, PI, 5):
        assert abs(phi_complex(POISSON, 0.99, x, B)) <= 1 + 1e-9


def test_complex_against_uniform_grid():
    # transitions of the n = 4096 factor have width about sqrt(delta) / n = 2.4e-5,
    # resolved by ~40 points of the 10^7 grid
    B = BlaschkeProduct((BlaschkeFactor(16, 1e-2), BlaschkeFactor(4096, 1e-2)))
    r, x = 0.999, 0.3
    n = 10**7
    h = 2 * PI / n
    total = 0j
    for start in range(0, n, 10**6):
        t = -PI + h * (np.arange(start, start + 10**6) + 0.5)
        total += np.sum(POISSON.density(r, t) * B(x - t))
    assert phi_complex(POISSON, r, x, B) == pytest.approx(total * h, abs=1e-6)


def test_complex_single_factor_is_poisson_extension():
    # for the Poisson kernel, Phi_r(x, b) is b evaluated inside the disk at r e^{ix}
    f = BlaschkeFactor(5, 1e-3)
    r, x = 0.98, 0.7
    z = (r * np.exp(1j * x)) ** 5
    want = (z - f.q) / (f.q * z - 1)
    assert phi_complex(POISSON, r, x, BlaschkeProduct((f,)), tol=1e-10) == pytest.approx(want, abs=1e-9)


def test_complex_refuses_extreme_radius():
    B = BlaschkeProduct((BlaschkeFactor(5, 1e-3),))
    with pytest.raises(QuadratureError):
        phi_complex(POISSON, 1 - 1e-11, 0.0, B)
    with pytest.raises(ValueError):
        phi_complex(POISSON, 0.9, 0.0, B, tol=1e-12)


def test_complex_budget_error():
    B = BlaschkeProduct((BlaschkeFactor(4096, 1e-6),))
    with pytest.raises(QuadratureError):
        phi_complex(POISSON, 0.999, 0.0, B, tol=1e-10, max_panels=100)
