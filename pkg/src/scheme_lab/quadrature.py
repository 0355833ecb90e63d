"""Adaptive Simpson integration with explicit breakpoint handling.

The scheme evaluator integrates piecewise-smooth functions of the period-1
cost whose only non-smooth points are (a) kernel-supplied breakpoints and
(b) the agent's decision boundaries.  Both are located exactly and the
integral is split there, so each Simpson call sees a smooth integrand.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .errors import QuadratureError

_MAX_DEPTH = 48

# sub-intervals narrower than this are accepted as-is: integrands are bounded,
# so an undetected jump this tight contributes O(1e-12) mass at most (this
# absorbs breakpoints that land a few ulps off the true discontinuity)
_WIDTH_FLOOR = 1e-12


def _simpson(f: Callable[[float], float], a: float, fa: float, b: float, fb: float,
             m: float, fm: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, m, fm, lm, flm)
    right = _simpson(f, m, fm, b, fb, rm, frm)
    err = left + right - whole
    if abs(err) <= 15.0 * tol or (b - a) < _WIDTH_FLOOR:
        return left + right + err / 15.0, abs(err) / 15.0
    if depth >= _MAX_DEPTH:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a:.6g}, {b:.6g}]",
            achieved_tolerance=abs(err) / 15.0,
        )
    lv, le = _adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1)
    rv, re = _adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1)
    return lv + rv, le + re


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-9) -> float:
    """Integrate a smooth ``f`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(f, a, fa, b, fb, m, fm)
    value, _ = _adaptive(f, a, fa, b, fb, m, fm, whole, tol, 0)
    return value


def integrate_segments(f: Callable[[float], float], segments: Sequence[tuple[float, float]],
                       tol: float = 1e-9) -> float:
    """Integrate ``f`` over a union of disjoint segments, splitting the budget."""
    live = [(a, b) for a, b in segments if b > a]
    if not live:
        return 0.0
    per = tol / len(live)
    return sum(adaptive_simpson(f, a, b, per) for a, b in live)


def split_points(a: float, b: float, interior: Iterable[float]) -> list[float]:
    """Sorted partition of ``[a, b]`` refined at the interior points given."""
    pts = sorted({a, b, *(p for p in interior if a < p < b)})
    return pts


def bisect_boundary(pred: Callable[[float], bool], lo: float, hi: float,
                    tol: float = 1e-12) -> float:
    """Locate a flip of a boolean predicate inside ``[lo, hi]`` by bisection.

    ``pred(lo)`` and ``pred(hi)`` must differ; returns a point within ``tol``
    of the boundary.
    """
    plo = pred(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
