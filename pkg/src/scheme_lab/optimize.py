"""Deterministic numerical optimization over rules and FGM dependence.

Two-phase search: a coarse grid localizes the optimum, then coordinate-wise
golden-section refinement polishes it.  Everything is deterministic for a
fixed configuration: grids are fixed, golden-section probes are fixed, and
coarse-grid ties break to the lexicographically smallest (z, y, theta).  For
w > 1 every rule with z >= 1 and an exhausted budget performs identically,
so results there are canonicalized to the representative (0, y, w).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import fgm_rule_performance
from .errors import DomainError, ParameterError, RegimeError
from .model import RewardRule

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchConfig:
    """Search resolution; ties always break to smallest (z, y, theta)."""

    coarse_step: float = 0.01
    theta_step: float = 0.05
    refine_tolerance: float = 1e-6
    max_refine_sweeps: int = 50

    def __post_init__(self):
        if self.coarse_step <= 0 or self.theta_step <= 0:
            raise ParameterError("coarse steps must be positive")
        if self.refine_tolerance <= 0:
            raise ParameterError("refine tolerance must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    rule: RewardRule
    theta: float | None
    performance: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class SweepRow:
    w: float
    x: float
    y: float
    z: float
    theta: float | None
    performance: float


def _axis_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    pts = np.arange(lo, hi, step)
    return np.unique(np.concatenate([pts, [hi]]))


def _golden_max(f, lo: float, hi: float, xtol: float):
    """Maximize f on [lo, hi], returning the best point actually evaluated.

    Endpoints are evaluated too, and ties keep the earlier (smaller) point,
    so a maximum at the bracket edge is returned exactly and plateaus do not
    drift the result.
    """
    evals = 2
    best_x, best_v = lo, f(lo)
    v_hi = f(hi)
    if v_hi > best_v:
        best_x, best_v = hi, v_hi
    span = hi - lo
    c = hi - _INVPHI * span
    d = lo + _INVPHI * span
    fc, fd = f(c), f(d)
    evals += 2
    for x, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_x, best_v = x, v
    while hi - lo > xtol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
            evals += 1
            if fc > best_v:
                best_x, best_v = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
            evals += 1
            if fd > best_v:
                best_x, best_v = d, fd
    return best_x, best_v, evals


def _coarse_grid_best(w: float, theta: float, step: float):
    """Best (performance, z, y) on the coarse grid; first flat index wins,
    which with a z-major layout is the lexicographically smallest (z, y)."""
    g = _axis_grid(0.0, w, step)
    zz, yy = np.meshgrid(g, g, indexing="ij")
    perf = fgm_rule_performance(w - zz, yy, zz, theta)
    flat = int(np.argmax(perf))
    iz, iy = divmod(flat, g.size)
    return float(perf.flat[flat]), float(g[iz]), float(g[iy]), perf.size


def _refine(w, y, z, theta, value, config, thetas_searched):
    evals = 0
    converged = False
    for _ in range(config.max_refine_sweeps):
        start = value
        for coord in ("y", "z", "theta"):
            if coord == "theta" and not thetas_searched:
                continue
            cur = {"y": y, "z": z, "theta": theta}[coord]
            step = config.theta_step if coord == "theta" else config.coarse_step
            lo_lim, hi_lim = (-1.0, 1.0) if coord == "theta" else (0.0, w)
            lo = max(lo_lim, cur - step)
            hi = min(hi_lim, cur + step)
            if hi - lo <= config.refine_tolerance:
                continue

            def slice_fn(v, coord=coord):
                yy = v if coord == "y" else y
                zz = v if coord == "z" else z
                tt = v if coord == "theta" else theta
                return float(fgm_rule_performance(w - zz, yy, zz, tt))

            x_best, v_best, n = _golden_max(slice_fn, lo, hi, config.refine_tolerance)
            evals += n
            if v_best > value:
                value = v_best
                if coord == "y":
                    y = x_best
                elif coord == "z":
                    z = x_best
                else:
                    theta = x_best
        if value - start < config.refine_tolerance:
            converged = True
            break
    return y, z, theta, value, evals, converged


def _optimize(w: float, config: SearchConfig, thetas: np.ndarray | None) -> OptimizationResult:
    if w >= 1.5:
        raise RegimeError(
            f"w={w} is in the trivial regime; the all-or-nothing rule (0, 0, w) "
            f"already induces both performances"
        )
    joint = thetas is not None
    theta_list = thetas if joint else np.array([0.0])
    best = None  # (perf, z, y, theta)
    evals = 0
    for theta in theta_list:
        perf, z, y, n = _coarse_grid_best(w, float(theta), config.coarse_step)
        evals += n
        key = (z, y, float(theta))
        if best is None or perf > best[0] or (perf == best[0] and key < best[1:]):
            best = (perf, z, y, float(theta))
    perf, z, y, theta = best
    y, z, theta, perf, n, converged = _refine(
        w, y, z, theta, perf, config, thetas_searched=joint
    )
    evals += n
    if w > 1.0 and z >= 1.0 - 1e-9:
        # all z >= 1 with x + z = w are payoff-equivalent; report (0, y, w)
        z = w
        perf = float(fgm_rule_performance(0.0, y, z, theta))
    rule = RewardRule(w - z, y, z, w)
    return OptimizationResult(
        rule=rule,
        theta=theta if joint else None,
        performance=perf,
        evaluations=evals,
        converged=converged,
    )


def optimize_rule_iid(w: float, config: SearchConfig | None = None) -> OptimizationResult:
    """Search (y, z) in [0, w]^2 with x = w - z under independent costs."""
    if w < 0:
        raise DomainError(f"budget must be non-negative, got {w}")
    return _optimize(w, config or SearchConfig(), thetas=None)


def optimize_fgm(w: float, config: SearchConfig | None = None) -> OptimizationResult:
    """Jointly search the rule and the FGM dependence parameter."""
    if w <= 0:
        raise DomainError(f"joint optimization needs w > 0, got {w}")
    config = config or SearchConfig()
    thetas = _axis_grid(-1.0, 1.0, config.theta_step)
    return _optimize(w, config, thetas=thetas)


_MODES = ("iid", "fgm", "fgm_theta_zero")


def sweep(w_min: float, w_max: float, step: float, mode: str,
          config: SearchConfig | None = None) -> list[SweepRow]:
    """One optimization per budget on [w_min, w_max) at the given step.

    Row order is ascending in w regardless of how rows are computed; the
    SCHEME_LAB_THREADS environment variable caps the worker count (default
    serial).
    """
    if step <= 0:
        raise ParameterError(f"sweep step must be positive, got {step}")
    if mode not in _MODES:
        raise ParameterError(f"unknown sweep mode {mode!r}; expected one of {_MODES}")
    if not 0.0 <= w_min < w_max <= 1.5:
        raise ParameterError(
            f"sweep range must satisfy 0 <= w_min < w_max <= 1.5, got "
            f"[{w_min}, {w_max})"
        )
    count = max(int(math.ceil((w_max - w_min) / step - 1e-12)), 1)
    ws = [w_min + k * step for k in range(count)]
    ws = [w for w in ws if w < w_max - 1e-12] or [w_min]
    config = config or SearchConfig()

    def row(w: float) -> SweepRow:
        if mode == "fgm":
            res = optimize_fgm(w, config)
            theta = res.theta
        else:
            res = optimize_rule_iid(w, config)
            theta = 0.0 if mode == "fgm_theta_zero" else None
        return SweepRow(
            w=w, x=res.rule.x, y=res.rule.y, z=res.rule.z,
            theta=theta, performance=res.performance,
        )

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, ws))
    return [row(w) for w in ws]


def _worker_count() -> int:
    raw = os.environ.get("SCHEME_LAB_THREADS", "")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1
