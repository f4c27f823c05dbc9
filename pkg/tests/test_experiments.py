import math

import numpy as np
import pytest

from tangential.counterexamples import BlaschkeProduct, build_sets
from tangential.curves import ApproachCurve
from tangential.errors import BracketError
from tangential.experiments import (first_target, locate, sample_points, sweep, theorem1_bound,
                                    theorem1_trace, theorem2_gap)
from tangential.kernels import Kernel
from tangential.schedule import Schedule, ScheduleEntry, build_schedule

PI = math.pi
POISSON = Kernel("poisson")
QUARTER = ApproachCurve("power", 1.0, 0.25)
CONFIG1 = {"kernel": {"family": "poisson"}, "curve": QUARTER.to_dict(), "variant": "theorem1",
           "K": 2, "N": 40, "beta_target": 0.98, "tail_exponent": 1.0}


@pytest.fixture(scope="module")
def demo():
    return build_schedule(POISSON, QUARTER, 2, "theorem1", 0.98, tail_exponent=1.0)


@pytest.fixture(scope="module")
def blaschke_demo():
    return build_schedule(POISSON, QUARTER, 1, "theorem2", 1.0)


def test_first_target_example():
    j0, target = first_target(0.0, 8)
    assert j0 == 1 and target == pytest.approx(PI / 4)


def test_target_window(rng):
    for n in (3, 8, 101, 5000):
        for x in rng.uniform(-PI, PI, 200):
            j0, target = first_target(x, n)
            assert 0 <= j0 < n
            assert 2 * PI / n * (1 - 1e-12) <= target < 4 * PI / n * (1 + 1e-12)
            # target equals 2 pi j0 / n - x modulo 2 pi
            assert math.remainder(2 * PI * j0 / n - x - target, 2 * PI) == pytest.approx(0, abs=1e-12)


def test_locate_inside_window(demo, rng):
    for e in demo.entries:
        for x in rng.uniform(-PI, PI, 50):
            loc = locate(x, e.n, QUARTER, e.u, e.v)
            assert e.u <= loc["r"] <= e.v
            assert float(QUARTER(e.v)) <= loc["target"] <= float(QUARTER(e.u))


def test_locate_theorem2_order(blaschke_demo):
    e = blaschke_demo.entries[0]
    loc = locate(0.4, e.n, QUARTER, e.u, e.v, "theorem2")
    assert loc["target2"] - loc["target"] == pytest.approx(PI / e.n)
    assert loc["r_second"] < loc["r_prime"]
    assert float(QUARTER(loc["r_second"])) == pytest.approx(loc["target2"], abs=1e-9)


def test_locate_no_bracket():
    with pytest.raises(BracketError):
        locate(0.0, 8, QUARTER, 0.99, 0.999)


def test_bounds():
    assert theorem1_bound(1, 0.98) == (">=", 0.98 * 0.5 - 0.5)
    assert theorem1_bound(4, 0.98) == ("<=", 1 - 0.98 * (1 - 1 / 16) + 1 / 16)


def test_trace_inequalities(demo, rng):
    seq = build_sets(demo)
    for x in list(rng.uniform(-PI, PI, 30)) + [0.0]:
        tr = theorem1_trace(POISSON, QUARTER, demo, seq, x)
        assert tr.passed, tr.records
        assert all(rec["in_window"] for rec in tr.records)
        assert tr.gap >= 2 * 0.98 - 1 - 2 ** -1


def test_shift_equivariance(demo, rng):
    # with n_1 | n_2 the final set is 2 pi / n_1 periodic, so traces repeat
    e1, e2 = demo.entries
    n2 = (e2.n // e1.n) * e1.n
    sched = Schedule([e1, ScheduleEntry(2, e2.delta, e2.u, e2.v, n2)], "theorem1", 0.98, 1.0, {}, {})
    seq = build_sets(sched)
    for x in rng.uniform(-PI, PI - 0.2, 10):
        a = theorem1_trace(POISSON, QUARTER, sched, seq, x)
        b = theorem1_trace(POISSON, QUARTER, sched, seq, x + 2 * PI / e1.n)
        for ra, rb in zip(a.records, b.records):
            n = sched.entries[ra["k"] - 1].n
            assert rb["j0"] == (ra["j0"] + n // e1.n) % n
            assert rb["phi"] == pytest.approx(ra["phi"], abs=1e-9)


def test_theorem2_gap_first_level(blaschke_demo):
    B = blaschke_demo.blaschke()
    rec = theorem2_gap(POISSON, QUARTER, blaschke_demo, B, 0.3, 1)
    assert not rec["bound_active"] and rec["bound"] == 1 - 8
    assert rec["anchor_modulus_error"] <= 1e-10
    assert rec["anchor_prime"] <= rec["component_limit"] and rec["anchor_second"] <= rec["component_limit"]
    assert rec["passed"]
    with pytest.raises(ValueError):
        theorem2_gap(POISSON, QUARTER, blaschke_demo, B, 0.3, 2)


def test_sweep_empty():
    rows, summary = sweep({**CONFIG1, "N": 0})
    assert rows == [] and summary["violations"] == 0 and summary["min_gap"] is None


def test_sweep_theorem1():
    rows, summary = sweep(CONFIG1)
    assert summary["violations"] == 0 and not summary["errors"]
    assert len(rows) == 2 * CONFIG1["N"]
    assert summary["min_gap"] >= 2 * 0.98 - 1 - 2 ** -1
    assert summary["seed"] == 20240601


def test_sweep_reproducible():
    assert sweep(CONFIG1) == sweep(CONFIG1)
    assert np.array_equal(sample_points(5, 1), sample_points(5, 1))


def test_sweep_theorem2():
    cfg = {**CONFIG1, "variant": "theorem2", "K": 1, "N": 3, "beta_target": 1.0}
    cfg.pop("tail_exponent")
    rows, summary = sweep(cfg)
    assert summary["violations"] == 0 and len(rows) == 3
    assert summary["k_level"] == 1
