"""Verification suites cross-checking every analytic result.

Each check pins its tolerance and returns a :class:`CheckResult`; the CLI
``verify`` command and the acceptance test module both run these.  Checks
compare independent computation paths (closed forms vs dense grid search,
quadrature vs Monte Carlo, formulas vs finite differences) and never share
the code path they are checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic, montecarlo
from .errors import InfeasibilityError
from .kernels import (
    FgmKernel,
    IidKernel,
    dependence_summary,
    make_purely_sufficient_kernel,
    make_purely_sustained_kernel,
    marginal_deviation,
    sample_pairs,
)
from .model import RewardRule, evaluate_scheme, performance_iid
from .optimize import optimize_fgm, optimize_rule_iid

MC_N = 1_000_000
MC_SEED = 20250810


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


# ---------------------------------------------------------------------------
# independent-cost closed forms
# ---------------------------------------------------------------------------


def check_optimal_rule_grid() -> CheckResult:
    """201x201 grid search attains the closed-form optimum (1e-3) and its
    argmax lands within one grid cell of the closed-form rule."""
    failures = []
    for w in (0.2, 0.5, 0.8, 1.0, 1.2, 1.45):
        grid = np.linspace(0.0, w, 201)
        cell = w / 200.0
        zz, yy = np.meshgrid(grid, grid, indexing="ij")
        perf = analytic.fgm_rule_performance(w - zz, yy, zz, 0.0)
        flat = int(np.argmax(perf))
        iz, iy = divmod(flat, grid.size)
        gy, gz, gp = float(grid[iy]), float(grid[iz]), float(perf.flat[flat])
        best = analytic.optimal_rule_iid(w)
        target = performance_iid(best.rules[0]).performance
        if abs(gp - target) > 1e-3:
            failures.append(f"w={w}: grid perf {gp:.6f} vs closed form {target:.6f}")
            continue
        tol = cell + 1e-9
        if w > 1.0:
            ok = abs(gy - best.rules[0].y) <= tol and gz >= 1.0 - tol
        else:
            ok = any(
                abs(gy - r.y) <= tol and abs(gz - r.z) <= tol for r in best.rules
            )
        if not ok:
            failures.append(f"w={w}: grid argmax (y={gy:.4f}, z={gz:.4f}) off the closed-form rule")
    return _result(
        "closed-form optimum vs 201x201 grid search",
        not failures,
        "; ".join(failures) or "6 budgets matched",
    )


def check_dual_optimum() -> CheckResult:
    """At w = 1 both closed-form optima evaluate to the same performance,
    the brute-force optimum 29/27."""
    a = performance_iid(RewardRule(2.0 / 3.0, 1.0, 1.0 / 3.0, 1.0)).performance
    b = performance_iid(RewardRule(0.0, 1.0 / 3.0, 1.0, 1.0)).performance
    target = 29.0 / 27.0
    ok = abs(a - b) <= 1e-9 and abs(a - target) <= 1e-9
    return _result(
        "dual optimum at w = 1",
        ok,
        f"perf {a:.12f} / {b:.12f} vs 29/27 = {target:.12f}",
    )


def random_feasible_points(count: int = 100, seed: int = 4242):
    """Interior feasible (w, y, z) with y, z <= 1 and the threshold away from
    the clamping kinks, for derivative checks."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        w = rng.uniform(0.15, 1.49)
        hi = min(w, 1.0) - 0.05
        if hi <= 0.05:
            continue
        y = rng.uniform(0.05, hi)
        z = rng.uniform(0.05, min(hi, w - 0.02))
        x = w - z
        cbar = x + 0.5 * z * z - 0.5 * y * y
        if not 0.02 < cbar < 0.98:
            continue
        pts.append((w, y, z))
    return pts


def _fd_partials(w: float, y: float, z: float, h: float = 1e-5):
    """Central differences of the closed-form performance: y at fixed x,
    z along the exhausted budget x = w - z."""
    def perf(x_, y_, z_):
        return performance_iid(RewardRule(x_, y_, z_, w)).performance

    x = w - z
    dy = (perf(x, y + h, z) - perf(x, y - h, z)) / (2.0 * h)
    dz = (perf(w - (z + h), y, z + h) - perf(w - (z - h), y, z - h)) / (2.0 * h)
    return dy, dz


def check_derivative_identity() -> CheckResult:
    """Finite differences reproduce d/dy + d/dz = (z - y)^2 within 1e-6."""
    worst = 0.0
    for w, y, z in random_feasible_points():
        dy, dz = _fd_partials(w, y, z)
        worst = max(worst, abs(dy + dz - (z - y) ** 2))
    return _result(
        "derivative identity (z - y)^2",
        worst <= 1e-6,
        f"max |dy + dz - (z-y)^2| = {worst:.2e} over 100 points",
    )


# ---------------------------------------------------------------------------
# FGM dependence
# ---------------------------------------------------------------------------


def check_fgm_monotonicity() -> CheckResult:
    """Performance monotonicity in theta for the two extreme rules."""
    thetas = np.linspace(-1.0, 1.0, 21)
    failures = []
    for w in (0.3, 0.5, 0.7, 0.9, 1.2):
        p = [analytic.fgm_sufficient_performance(w, t).performance for t in thetas]
        d = np.diff(p)
        if w < 1.0:
            ok = np.all(d < -1e-12)
        else:
            ok = np.all(d <= 1e-12)
        if not ok:
            failures.append(f"sufficient rule not monotone at w={w}")
    for w in (0.5, 0.8):
        p = [analytic.fgm_sustained_performance(w, t).performance for t in thetas]
        if not np.all(np.diff(p) > 1e-12):
            failures.append(f"sustained rule not strictly increasing at w={w}")
    for w in (1.1, 1.3):
        p = [analytic.fgm_sustained_performance(w, t).performance for t in thetas]
        if not np.all(np.diff(p) < -1e-12):
            failures.append(f"sustained rule not strictly decreasing at w={w}")
    p1 = [analytic.fgm_sustained_performance(1.0, t).performance for t in thetas]
    if not np.max(np.abs(np.diff(p1))) <= 1e-12:
        failures.append("sustained rule not constant at w=1")
    return _result(
        "performance monotonicity in theta",
        not failures,
        "; ".join(failures) or "21-point theta grids monotone as required",
    )


def check_joint_optimum_shape() -> CheckResult:
    """theta* = -1 on both budget plateaus, interior inside (0.86, 1), and
    dependence tuning buys at most 0.01 over independence on that band."""
    failures = []
    plateau = [round(0.05 * k, 2) for k in range(1, 18)]
    plateau += [round(1.0 + 0.05 * k, 2) for k in range(10)]
    for w in plateau:
        res = optimize_fgm(w)
        if res.theta != -1.0:
            failures.append(f"theta*({w}) = {res.theta} != -1")
    band = [round(0.87 + 0.01 * k, 2) for k in range(13)]
    interior = 0
    worst_gap = 0.0
    for w in band:
        res = optimize_fgm(w)
        base = optimize_rule_iid(w)
        worst_gap = max(worst_gap, res.performance - base.performance)
        if -1.0 + 1e-9 < res.theta < 1.0 - 1e-9:
            interior += 1
    if interior == 0:
        failures.append("no interior theta* found in (0.86, 1)")
    if worst_gap > 0.01:
        failures.append(f"tuned-vs-independent gap {worst_gap:.4f} > 0.01 on the band")
    return _result(
        "joint optimum shape over budgets",
        not failures,
        "; ".join(failures) or
        f"plateaus at -1, {interior}/13 interior, max band gap {worst_gap:.4f}",
    )


def check_fgm_spearman() -> CheckResult:
    """Monte Carlo Spearman correlation equals theta/3 within 0.01."""
    failures = []
    for theta in (-1.0, 0.0, 1.0):
        dep = dependence_summary(FgmKernel(theta), MC_N, MC_SEED)
        if abs(dep["spearman"] - theta / 3.0) > 0.01:
            failures.append(f"theta={theta}: spearman {dep['spearman']:.4f}")
    return _result(
        "FGM Spearman correlation theta/3",
        not failures,
        "; ".join(failures) or "matched at theta in {-1, 0, 1}",
    )


# ---------------------------------------------------------------------------
# constructed schemes
# ---------------------------------------------------------------------------


def check_constructions_reach_bound() -> CheckResult:
    """Both constructions reach 2w: by quadrature to 1e-6 and by Monte Carlo
    within 3 standard errors; infeasible construction rejected."""
    failures = []
    cases = [(make_purely_sufficient_kernel(w), RewardRule(w, w, 0.0, w), w)
             for w in (0.25, 0.4, 0.5)]
    cases += [(make_purely_sustained_kernel(w), RewardRule(0.0, 0.0, w, w), w)
              for w in (0.3, 0.9, 1.0)]
    for kernel, rule, w in cases:
        perf = evaluate_scheme(kernel, rule).performance
        if abs(perf - 2.0 * w) > 1e-6:
            failures.append(f"{kernel.kind} w={w}: quadrature {perf:.8f} != {2*w}")
        rep = montecarlo.simulate(kernel, rule, MC_N, MC_SEED)
        slack = 3.0 * rep.stderr if rep.stderr > 0 else 1e-12
        if abs(rep.estimate - 2.0 * w) > slack:
            failures.append(
                f"{kernel.kind} w={w}: MC {rep.estimate:.6f} off 2w by "
                f"{abs(rep.estimate - 2*w) / max(rep.stderr, 1e-300):.1f} sigma"
            )
    try:
        make_purely_sufficient_kernel(0.6)
        failures.append("w=0.6 sufficient construction not rejected")
    except InfeasibilityError:
        pass
    return _result(
        "bound-attaining constructions reach 2w",
        not failures,
        "; ".join(failures) or "6 schemes at 2w, infeasible w rejected",
    )


def check_sustained_dependence() -> CheckResult:
    """Below-budget pairs of the sustained kernel: Pearson correlation -1
    within 0.01 and covariance -w^2/12 within 3 standard errors."""
    failures = []
    for w in (0.5, 0.9):
        kernel = make_purely_sustained_kernel(w)
        a, b = sample_pairs(kernel, MC_N, MC_SEED)
        sel = a <= w
        aa, bb = a[sel], b[sel]
        rho = float(np.corrcoef(aa, bb)[0, 1])
        if abs(rho + 1.0) > 0.01:
            failures.append(f"w={w}: conditional correlation {rho:.4f}")
        prod = (aa - aa.mean()) * (bb - bb.mean())
        cov = float(prod.mean())
        se = float(prod.std(ddof=1) / np.sqrt(prod.size))
        if abs(cov + w * w / 12.0) > 3.0 * se:
            failures.append(f"w={w}: conditional covariance {cov:.6f} vs {-w*w/12:.6f}")
    return _result(
        "sustained-kernel conditional dependence",
        not failures,
        "; ".join(failures) or "correlation -1 and covariance -w^2/12 matched",
    )


def _ks_uniform(sample: np.ndarray) -> float:
    s = np.sort(sample)
    n = s.size
    up = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(up - s), np.max(s - lo)))


def check_marginal_uniformity() -> CheckResult:
    """Analytic marginal recovery within 1e-6 for every shipped kernel, and
    empirical marginals at n = 10^6 inside 1.5x the 1% KS band."""
    kernels = [IidKernel()]
    kernels += [FgmKernel(t) for t in (-1.0, -0.5, 0.0, 0.5, 1.0)]
    kernels += [make_purely_sufficient_kernel(0.4), make_purely_sustained_kernel(0.9)]
    failures = []
    ks_limit = 1.63 / np.sqrt(MC_N) * 1.5
    for kernel in kernels:
        dev = marginal_deviation(kernel)
        if dev > 1e-6:
            failures.append(f"{kernel.description}: marginal deviation {dev:.2e}")
        a, b = sample_pairs(kernel, MC_N, MC_SEED)
        ks = max(_ks_uniform(a), _ks_uniform(b))
        if ks > ks_limit:
            failures.append(f"{kernel.description}: KS deviation {ks:.4f} > {ks_limit:.4f}")
    return _result(
        "uniform marginals (analytic and empirical)",
        not failures,
        "; ".join(failures) or f"8 kernels within 1e-6 / KS {ks_limit:.4f}",
    )


def check_performance_bounds() -> CheckResult:
    """No evaluation exceeds 2*min(w,1); z = 0 caps performance at 1; the
    trivial budget w = 1.5 yields exactly 2."""
    rng = np.random.default_rng(99)
    failures = []
    iid = IidKernel()
    kernels = [iid, FgmKernel(-1.0), FgmKernel(0.7),
               make_purely_sufficient_kernel(0.4), make_purely_sustained_kernel(0.9)]
    for kernel in kernels:
        w_fixed = kernel.w
        for _ in range(12):
            w = w_fixed if w_fixed is not None else float(rng.uniform(0.05, 1.49))
            z = float(rng.uniform(0.0, w))
            y = float(rng.uniform(0.0, min(w, 1.0)))
            x = float(rng.uniform(0.0, w - z))
            perf = evaluate_scheme(kernel, RewardRule(x, y, z, w)).performance
            if perf > 2.0 * min(w, 1.0) + 1e-6:
                failures.append(f"{kernel.description}: perf {perf:.6f} beats bound at w={w:.3f}")
            perf0 = evaluate_scheme(kernel, RewardRule(x, y, 0.0, w)).performance
            if perf0 > 1.0 + 1e-6:
                failures.append(f"{kernel.description}: z=0 perf {perf0:.6f} > 1")
    trivial = evaluate_scheme(iid, RewardRule(0.0, 0.0, 1.5, 1.5)).performance
    if trivial != 2.0:
        failures.append(f"w=1.5 trivial case gave {trivial!r}, expected exactly 2.0")
    return _result(
        "performance bounds",
        not failures,
        "; ".join(failures) or "cap 2*min(w,1), z=0 cap, trivial budget exact",
    )


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

SUITES: dict[str, list] = {
    "iid": [check_optimal_rule_grid, check_dual_optimum, check_derivative_identity],
    "fgm": [check_fgm_monotonicity, check_joint_optimum_shape, check_fgm_spearman],
    "schemes": [
        check_constructions_reach_bound,
        check_sustained_dependence,
        check_marginal_uniformity,
        check_performance_bounds,
    ],
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    results = []
    for suite in names:
        for check in SUITES[suite]:
            results.append(check())
    return results
