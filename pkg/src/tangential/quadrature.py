"""Adaptive panel quadrature with halving-based error certification.

Each panel is integrated with an n-point Gauss-Legendre rule and again as
two half panels; the difference is the panel's error estimate. Panels are
split until the summed estimate is below the tolerance or the panel budget
runs out, in which case :class:`~tangential.errors.QuadratureError` is
raised. The integrand must accept a 1-D array of abscissae.
"""
from __future__ import annotations

import numpy as np

from .errors import QuadratureError

_ORDER = 15
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)

DEFAULT_MAX_PANELS = 2**20


def _rule(f, a, b):
    """Gauss-Legendre on each panel [a_i, b_i]; returns (coarse, fine)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    quarter = 0.5 * half
    # nodes for the whole panel, the left half and the right half
    x_full = mid[:, None] + half[:, None] * _NODES
    x_left = (a + quarter)[:, None] + quarter[:, None] * _NODES
    x_right = (mid + quarter)[:, None] + quarter[:, None] * _NODES
    x = np.concatenate([x_full, x_left, x_right], axis=1)
    y = np.asarray(f(x.ravel())).reshape(x.shape)
    k = _ORDER
    coarse = half * (y[:, :k] @ _WEIGHTS)
    fine = quarter * (y[:, k:2 * k] @ _WEIGHTS + y[:, 2 * k:] @ _WEIGHTS)
    return coarse, fine


def integrate(f, breakpoints, tol=1e-10, max_panels=DEFAULT_MAX_PANELS, is_complex=False):
    """Integrate ``f`` over [breakpoints[0], breakpoints[-1]].

    ``breakpoints`` seed the initial panels (they are sorted and
    de-duplicated). Returns ``(value, error_estimate, n_panels)``.
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if pts.size < 2:
        return (0j if is_complex else 0.0), 0.0, 0
    dtype = complex if is_complex else float

    done_a, done_b, done_val, done_err = [], [], [], []
    a, b = pts[:-1], pts[1:]
    n_panels = a.size
    while True:
        coarse, fine = _rule(f, a, b)
        coarse = coarse.astype(dtype)
        fine = fine.astype(dtype)
        err = np.abs(fine - coarse)
        done_err_sum = float(np.sum([e.sum() for e in done_err])) if done_err else 0.0
        remaining = tol - done_err_sum
        # panels whose error is small relative to the remaining budget are final
        threshold = 0.5 * max(remaining, 0.0) / max(a.size, 1)
        width = b - a
        # splitting further cannot help once panels approach float spacing
        unsplittable = width <= 64 * np.spacing(np.maximum(np.abs(a), np.abs(b)))
        accept = (err <= threshold) | unsplittable
        done_a.append(a[accept])
        done_b.append(b[accept])
        done_val.append(fine[accept])
        done_err.append(err[accept])
        if np.all(accept):
            break
        a_s, b_s = a[~accept], b[~accept]
        m = 0.5 * (a_s + b_s)
        a = np.concatenate([a_s, m])
        b = np.concatenate([m, b_s])
        n_panels += a_s.size
        if n_panels > max_panels:
            est = _ordered_sum(done_a + [a_s], done_val + [fine[~accept]])
            total_err = float(sum(e.sum() for e in done_err)) + float(err[~accept].sum())
            raise QuadratureError(
                f"panel budget {max_panels} exhausted with error estimate {total_err:.3e} > tol {tol:.3e}",
                estimate=est, error=total_err)

    total_err = float(sum(e.sum() for e in done_err))
    value = _ordered_sum(done_a, done_val)
    if total_err > tol:
        raise QuadratureError(
            f"error estimate {total_err:.3e} exceeds tol {tol:.3e} (float resolution reached)",
            estimate=value, error=total_err)
    return value, total_err, n_panels


def _ordered_sum(lefts, values):
    # summation in left-endpoint order keeps the result independent of refinement history
    left = np.concatenate(lefts)
    val = np.concatenate(values)
    order = np.argsort(left, kind="stable")
    return val[order].sum()


def graded_points(center, scale, lo, hi, ratio=2.0):
    """Breakpoints ``center +- scale * ratio**j`` clipped to [lo, hi].

    Used to resolve a peak of width ``scale`` at ``center``.
    """
    pts = [lo, hi]
    if lo <= center <= hi:
        pts.append(center)
    span = max(hi - lo, 0.0)
    step = scale
    while step < span:
        for p in (center - step, center + step):
            if lo < p < hi:
                pts.append(p)
        step *= ratio
    return np.asarray(pts)
