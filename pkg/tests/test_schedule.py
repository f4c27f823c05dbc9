import copy
import math

import pytest

from tangential.curves import ApproachCurve
from tangential.errors import ScheduleError
from tangential.kernels import Kernel, abs_continuity_threshold
from tangential.schedule import (Check, Schedule, build_schedule, certify, theorem2_extras,
                                 validate_schedule)

POISSON = Kernel("poisson")
QUARTER = ApproachCurve("power", 1.0, 0.25)


@pytest.fixture(scope="module")
def demo():
    return build_schedule(POISSON, QUARTER, 2, "theorem1", 0.98, tail_exponent=1.0)


@pytest.fixture(scope="module")
def blaschke_demo():
    return build_schedule(POISSON, QUARTER, 1, "theorem2", 1.0)


def test_demo_entries(demo):
    assert demo.passed
    for i, e in enumerate(demo.entries):
        assert e.delta < 2.0 ** (-e.k - 5)
        assert e.u < e.v < 1
        assert 3 * float(QUARTER(e.v)) <= float(QUARTER(e.u))
        assert e.n == math.floor(5 * math.pi / float(QUARTER(e.u)))
        if i:
            assert demo.entries[i - 1].v < e.u


def test_demo_validates_by_quadrature(demo):
    rep = validate_schedule(demo, POISSON, QUARTER)
    assert rep.passed, rep.failures
    for cs in rep.checks:
        for c in cs:
            assert c.margin > 0 or (c.relation == "==" and c.margin == 0)


def test_deterministic(demo):
    again = build_schedule(POISSON, QUARTER, 2, "theorem1", 0.98, tail_exponent=1.0)
    assert again.dumps() == demo.dumps()


def test_json_round_trip(demo):
    back = Schedule.from_json(demo.to_json())
    assert back.dumps() == demo.dumps()
    assert back.entries == demo.entries


def test_tail_rule_and_threshold(demo):
    e1, e2 = demo.entries
    p = demo.tail_exponent
    # the measure bound the builder certified, as an absolute-continuity threshold
    m = abs_continuity_threshold(POISSON, 2.0 ** -e1.k, e1.v)
    assert m > 10 * math.pi * e2.delta ** p


def test_linear_curve_is_infeasible():
    with pytest.raises(ScheduleError) as info:
        build_schedule(POISSON, ApproachCurve("linear", 1.0), 2, "theorem1", 0.95)
    assert info.value.reason == "infeasible-beta"
    assert info.value.k == 1


def test_fourth_root_budget_underflows_for_sqrt_curve():
    # with the 20 pi delta^(1/4) tail budget no delta_2 >= 1e-18 works at r = v_1
    with pytest.raises(ScheduleError) as info:
        build_schedule(POISSON, ApproachCurve("power", 1.0, 0.5), 4, "theorem1", 0.98)
    assert info.value.reason == "tail-cap-underflow"


def _tampered(sched, **changes):
    s = copy.deepcopy(sched)
    for key, value in changes.items():
        setattr(s.entries[0], key, value)
    s.certificate = certify(s, POISSON, QUARTER)
    return s


def test_tampered_delta_fails_p9(demo):
    s = _tampered(demo, delta=2.0 ** -5)
    failed = {c.name for c in s.certificate[0] if not c.passed}
    assert "delta_small" in failed and not s.passed


def test_tampered_u_fails_p8(demo):
    s = _tampered(demo, u=0.5)
    failed = {c.name for c in s.certificate[0] if not c.passed}
    assert "window_mass" in failed


def test_theorem2_first_level(blaschke_demo):
    s = blaschke_demo
    assert s.passed
    checks = {c.name: c for c in s.certificate[0]}
    assert checks["continuity"].value == 0.0  # empty B_0
    assert checks["plus_grid"].value < 0.5 and checks["minus_grid"].value < 0.5
    assert s.blaschke().K == 1


def test_theorem2_extras_shrinks_delta():
    e = theorem2_extras(1, 2.0 ** -7, None, POISSON, QUARTER, 1.0, 0.0)
    assert 8 * math.e * math.pi * math.sqrt(e.delta) < 0.5


def test_argument_checks():
    with pytest.raises(ValueError):
        build_schedule(POISSON, QUARTER, 0)
    with pytest.raises(ValueError):
        build_schedule(POISSON, QUARTER, 2, "theorem3")
    with pytest.raises(ValueError):
        build_schedule(POISSON, QUARTER, 2, "theorem2", 0.98, tail_exponent=1.0)
    with pytest.raises(ValueError):
        build_schedule(POISSON, QUARTER, 2, "theorem1", 0.4)


def test_check_semantics():
    assert Check("a", 1.0, 2.0, "<").passed
    assert not Check("a", 2.0, 2.0, "<").passed
    assert Check("a", 2.0, 2.0, "<=").passed
    assert Check("a", 3.0, 2.0, ">").margin == 1.0
    assert Check("a", 5, 5, "==").passed and not Check("a", 5, 6, "==").passed
