"""Construction and certification of the sequences (delta_k, u_k, v_k, n_k).

Every choice is made by a fixed scan, so building twice gives identical
schedules:

* delta_k is the largest power of two below ``2^(-k-6)`` and every cap
  imposed by earlier steps;
* u_k is the first r = 1 - 2^-i (i increasing) beyond v_{k-1} whose window
  mass exceeds ``beta (1 - 2^-k)`` with lambda(u_k) < pi;
* v_k solves 3 lambda(v_k) = lambda(u_k);
* the tail (delta_j for j > k) is pre-committed to decay geometrically,
  delta_j^p <= delta_{k+1}^p 2^-(j-k-1), so the exceptional measure
  10 pi sum_{j>k} delta_j^p is at most 20 pi delta_{k+1}^p; delta_{k+1} is
  halved until that measure carries kernel mass below 2^-k for all r <= v_k.

The exponent p is 1/4 by default (needed by the Blaschke construction);
p = 1 is enough for the indicator-set construction.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .counterexamples import (LEMMA_CONSTANT, LEMMA_DELTA_CAP, BlaschkeFactor,
                              BlaschkeProduct, minus_deviation, modulus_of_continuity,
                              plus_deviation)
from .curves import solve_radius
from .errors import BracketError, ScheduleError
from .kernels import R_MAX, quad_mass, radius_grid, sup_worst_mass

PI = math.pi
VARIANTS = ("theorem1", "theorem2")
#: last dyadic level i with 1 - 2^-i inside the radius cap
MAX_LEVEL = int(math.floor(-math.log2(1.0 - R_MAX)))
DELTA_FLOOR = 1e-18
#: constant of the off-comb bound |b - 1| <= C' delta^(1/4), valid for delta <= (pi/8)^4
OFF_COMB_CONSTANT = 16.0 / math.pi
LEMMA_GRID = 64


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str  # "<", "<=", ">", "==" (for integer identities)
    note: str = ""

    @property
    def margin(self):
        if self.relation in ("<", "<="):
            return self.bound - self.value
        if self.relation == ">":
            return self.value - self.bound
        return 0.0 if self.value == self.bound else -abs(self.value - self.bound)

    @property
    def passed(self):
        m = self.margin
        return m > 0 if self.relation in ("<", ">") else m >= 0

    def to_json(self):
        d = asdict(self)
        d["margin"] = self.margin
        d["passed"] = self.passed
        return d


@dataclass
class ScheduleEntry:
    k: int
    delta: float
    u: float
    v: float
    n: int

    def to_json(self):
        return {"k": self.k, "delta": self.delta, "u": self.u, "v": self.v, "n": int(self.n)}


@dataclass
class Schedule:
    entries: list
    variant: str
    beta_used: float
    tail_exponent: float
    kernel: dict
    curve: dict
    certificate: list = field(default_factory=list)  # per entry: list of Check

    @property
    def K(self):
        return len(self.entries)

    @property
    def passed(self):
        return all(c.passed for checks in self.certificate for c in checks)

    def blaschke(self):
        return BlaschkeProduct(tuple(BlaschkeFactor(e.n, e.delta) for e in self.entries))

    def to_json(self):
        return {
            "variant": self.variant,
            "beta_used": self.beta_used,
            "tail_exponent": self.tail_exponent,
            "kernel": self.kernel,
            "curve": self.curve,
            "entries": [e.to_json() for e in self.entries],
            "certificate": [[c.to_json() for c in checks] for checks in self.certificate],
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data):
        entries = [ScheduleEntry(int(e["k"]), float(e["delta"]), float(e["u"]), float(e["v"]), int(e["n"]))
                   for e in data["entries"]]
        cert = [[Check(c["name"], c["value"], c["bound"], c["relation"], c.get("note", "")) for c in checks]
                for checks in data.get("certificate", [])]
        return cls(entries, data["variant"], float(data["beta_used"]), float(data["tail_exponent"]),
                   dict(data["kernel"]), dict(data["curve"]), cert)


def _dyadic_floor(x):
    """Largest power of two <= x."""
    m, e = math.frexp(x)
    return math.ldexp(1.0, e - 1)


def _window_mass(kernel, curve, r, delta, quad=False):
    w = min(delta * float(curve(r)), PI)
    if quad:
        return quad_mass(kernel, r, -w, w)
    return kernel.mass(r, -w, w)


def _sup_worst_mass(kernel, tau, m, quad=False):
    if m >= 2 * PI:
        return 1.0
    if not quad:
        return sup_worst_mass(kernel, tau, m)
    if not kernel.unimodal:
        raise ValueError("quadrature re-check of worst mass needs a unimodal kernel")
    return max(quad_mass(kernel, r, -0.5 * m, 0.5 * m) for r in radius_grid(tau))


def _solve_v(curve, u, k):
    lam_u = float(curve(u))
    try:
        v = solve_radius(curve, lam_u / 3.0, u, 1.0)
    except BracketError as exc:
        raise ScheduleError("curve-not-shrinking", k, str(exc)) from exc
    # make 3 lambda(v) <= lambda(u) hold in floating point
    while 3.0 * float(curve(v)) > lam_u and v < 1.0:
        v = float(np.nextafter(v, 2.0))
    if not u < v < 1.0:
        raise ScheduleError("curve-not-shrinking", k, f"no v in (u, 1) with 3 lambda(v) = lambda(u) = {lam_u!r}")
    return v


def _nk(variant, lam_u):
    return int(math.floor((5.0 if variant == "theorem1" else 6.0) * PI / lam_u))


def _scan_u(kernel, curve, k, delta, beta, v_prev, variant, B_prev=None):
    """First dyadic radius satisfying the window-mass condition (and, for
    the Blaschke variant, the continuity condition on B_{k-1})."""
    need = beta * (1.0 - 2.0 ** -k)
    level = 1
    while 1.0 - 2.0 ** -level <= v_prev:
        level += 1
    for i in range(level, MAX_LEVEL + 1):
        r = 1.0 - 2.0 ** -i
        lam = float(curve(r))
        if not lam < PI:
            continue
        if not _window_mass(kernel, curve, r, delta) > need:
            continue
        v = _solve_v(curve, r, k)
        if v > R_MAX:
            raise ScheduleError("curve-not-shrinking", k,
                                f"v = {v!r} for u = {r!r} exceeds the radius cap 1 - 1e-12")
        n = _nk(variant, lam)
        if variant == "theorem2" and B_prev is not None and B_prev.factors:
            if not modulus_of_continuity(B_prev, 2 * PI / n) < 2.0 ** -k:
                continue
        return r, v, n
    raise ScheduleError("infeasible-beta", k,
                        f"no r = 1 - 2^-i <= 1 - 1e-12 gives window mass > {need!r} with delta = {delta!r}")


def _lemma_delta(delta, k):
    """Shrink delta until both factor bounds fall below 2^-k."""
    target = 2.0 ** -k
    delta = min(delta, _dyadic_floor(LEMMA_DELTA_CAP))
    while not (LEMMA_CONSTANT * math.sqrt(delta) < target and OFF_COMB_CONSTANT * delta ** 0.25 < target):
        delta *= 0.5
    return delta


def theorem2_extras(k, delta, B_prev, kernel, curve, beta, v_prev):
    """Adjust step k for the Blaschke construction.

    delta is shrunk until C sqrt(delta) and C' delta^(1/4) are below 2^-k and
    the grid maxima of |b_k + 1| on U(n_k, 6 delta) and |b_k - 1| off
    U(n_k, delta^(1/4)) are below 2^-k; u is pushed toward 1 until the
    modulus of continuity of B_{k-1} at 2 pi / n_k is below 2^-k.
    Returns a :class:`ScheduleEntry`.
    """
    delta = _lemma_delta(delta, k)
    target = 2.0 ** -k
    while delta >= DELTA_FLOOR:
        u, v, n = _scan_u(kernel, curve, k, delta, beta, v_prev, "theorem2", B_prev)
        if (plus_deviation(n, delta, 6.0 * delta, LEMMA_GRID) < target
                and minus_deviation(n, delta, delta ** 0.25, LEMMA_GRID) < target):
            return ScheduleEntry(k, delta, u, v, n)
        delta *= 0.5
    raise ScheduleError("tail-cap-underflow", k, "factor grid bounds need delta below 1e-18")


def build_schedule(kernel, curve, K, variant="theorem1", beta_target=0.98, tail_exponent=None):
    """Build and certify a schedule of depth K. Raises :class:`ScheduleError`."""
    if K < 1:
        raise ValueError("depth K must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if not 0.5 < beta_target <= 1.0:
        raise ValueError("beta_target must lie in (1/2, 1]")
    if tail_exponent is None:
        tail_exponent = 0.25
    if variant == "theorem2" and tail_exponent != 0.25:
        raise ValueError("the Blaschke construction needs the fourth-root tail budget")
    if tail_exponent not in (0.25, 1.0):
        raise ValueError("tail_exponent must be 0.25 or 1")
    p = tail_exponent

    caps = [math.inf] * (K + 2)  # caps[j]: upper bound on delta_j from earlier tail rules
    entries = []
    B = BlaschkeProduct()
    v_prev = 0.0
    for k in range(1, K + 1):
        delta = _dyadic_floor(min(2.0 ** (-k - 6), caps[k]))
        if variant == "theorem2":
            entry = theorem2_extras(k, delta, B, kernel, curve, beta_target, v_prev)
            B = B.append(BlaschkeFactor(entry.n, entry.delta))
        else:
            u, v, n = _scan_u(kernel, curve, k, delta, beta_target, v_prev, variant)
            entry = ScheduleEntry(k, delta, u, v, n)
        entries.append(entry)
        v_prev = entry.v

        if k < K:
            nxt = _dyadic_floor(min(2.0 ** (-k - 7), caps[k + 1]))
            while not _sup_worst_mass(kernel, entry.v, 20.0 * PI * nxt ** p) < 2.0 ** -k:
                nxt *= 0.5
                if nxt < DELTA_FLOOR:
                    raise ScheduleError(
                        "tail-cap-underflow", k,
                        f"delta_{k + 1} would have to be below 1e-18 for the tail of measure "
                        f"20 pi delta^{p:g} to carry mass < 2^-{k} at r = v_{k} = {entry.v!r}")
            for j in range(k + 1, K + 1):
                caps[j] = min(caps[j], nxt * 2.0 ** (-(j - k - 1) / p))

    sched = Schedule(entries, variant, float(beta_target), float(p), kernel.to_dict(), curve.to_dict())
    sched.certificate = certify(sched, kernel, curve)
    return sched


def certify(sched, kernel, curve, quad=False):
    """All inequalities of every entry, as a list of Check lists.

    With ``quad=True`` kernel masses are recomputed by adaptive quadrature
    of the density rather than from closed-form primitives.
    """
    beta = sched.beta_used
    p = sched.tail_exponent
    entries = sched.entries
    K = len(entries)
    out = []
    B = BlaschkeProduct()
    for idx, e in enumerate(entries):
        k = e.k
        lam_u = float(curve(e.u))
        lam_v = float(curve(e.v)) if e.v <= 1.0 else float("nan")
        checks = [
            Check("delta_small", e.delta, 2.0 ** (-k - 5), "<"),
            Check("u_below_v", e.u, e.v, "<"),
            Check("v_below_1", e.v, 1.0, "<"),
            Check("curve_shrinks", 3.0 * lam_v, lam_u, "<="),
            Check("lambda_below_pi", lam_u, PI, "<"),
            Check("n_k_formula", e.n, _nk(sched.variant, lam_u), "=="),
        ]
        if idx > 0:
            checks.append(Check("radii_increasing", entries[idx - 1].v, e.u, "<"))
        try:
            mass = _window_mass(kernel, curve, e.u, e.delta, quad=quad) if 0 < e.u <= R_MAX else float("nan")
        except ValueError:
            mass = float("nan")
        checks.append(Check("window_mass", mass, beta * (1.0 - 2.0 ** -k), ">"))
        if idx + 1 < K:
            nxt = entries[idx + 1].delta
            budget = 20.0 * PI * nxt ** p
            tail = 10.0 * PI * math.fsum(f.delta ** p for f in entries[idx + 1:])
            checks.append(Check("tail_budget", tail, budget, "<="))
            for f in entries[idx + 2:]:
                checks.append(Check(f"tail_rule_j{f.k}", f.delta ** p,
                                    nxt ** p * 2.0 ** -(f.k - k - 1), "<="))
            try:
                wm = _sup_worst_mass(kernel, e.v, budget, quad=quad) if e.v <= R_MAX else float("nan")
            except ValueError:
                wm = float("nan")
            checks.append(Check("tail_mass", wm, 2.0 ** -k, "<", note=f"measure 20 pi delta_{k + 1}^{p:g}"))
        if sched.variant == "theorem2":
            target = 2.0 ** -k
            checks.append(Check("lemma_delta_cap", e.delta, LEMMA_DELTA_CAP, "<="))
            checks.append(Check("plus_constant", LEMMA_CONSTANT * math.sqrt(e.delta), target, "<"))
            checks.append(Check("minus_constant", OFF_COMB_CONSTANT * e.delta ** 0.25, target, "<"))
            checks.append(Check("plus_grid", plus_deviation(e.n, e.delta, 6.0 * e.delta, LEMMA_GRID), target, "<"))
            checks.append(Check("minus_grid", minus_deviation(e.n, e.delta, e.delta ** 0.25, LEMMA_GRID), target, "<"))
            checks.append(Check("continuity", modulus_of_continuity(B, 2 * PI / e.n), target, "<"))
            B = B.append(BlaschkeFactor(e.n, e.delta))
        out.append(checks)
    return out


@dataclass
class ValidationReport:
    checks: list
    passed: bool
    failures: list

    def to_json(self):
        return {
            "passed": self.passed,
            "failures": self.failures,
            "entries": [[c.to_json() for c in cs] for cs in self.checks],
        }


def validate_schedule(sched, kernel, curve):
    """Re-check every inequality, with kernel masses from quadrature."""
    checks = certify(sched, kernel, curve, quad=True)
    failures = [f"k={sched.entries[i].k}: {c.name} (value {c.value!r} {c.relation} {c.bound!r}, margin {c.margin!r})"
                for i, cs in enumerate(checks) for c in cs if not c.passed]
    return ValidationReport(checks, not failures, failures)
