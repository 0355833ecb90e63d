"""Seeded Monte Carlo oracle for scheme performance.

Plays the two-period game forward: draw the period-1 cost, decide using the
kernel's conditional expectations (the agent knows the conditional law of his
future cost, never its realization), then draw the period-2 cost from the
conditional law and decide again.  Draws are keyed by (seed, index) so the
report is independent of chunking or parallel sharding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import chunks, draw_uniforms
from .errors import ParameterError
from .kernels import CostKernel, dependence_summary
from .model import TIE_TOL, RewardRule, evaluate_scheme


@dataclass(frozen=True)
class Counts:
    neither: int
    period1_only: int
    period2_only: int
    both: int

    def total(self) -> int:
        return self.neither + self.period1_only + self.period2_only + self.both


@dataclass(frozen=True)
class SimulationReport:
    estimate: float
    stderr: float
    n: int
    seed: int
    counts: Counts
    dependence: dict[str, float] | None = None


def simulate(kernel: CostKernel, rule: RewardRule, n: int, seed: int,
             with_dependence: bool = False) -> SimulationReport:
    """Estimate performance from n simulated agents.

    estimate = mean per-agent performance count (0, 1 or 2); stderr is the
    sample standard deviation of that count divided by sqrt(n).
    """
    if n < 1:
        raise ParameterError(f"simulation needs n >= 1 draws, got {n}")
    sum_c = 0.0
    sum_c2 = 0.0
    tallies = np.zeros(4, dtype=np.int64)  # index = perform1 + 2*perform2
    for start, count in chunks(n):
        u = draw_uniforms(seed, start, count)
        a = u[:, 0]
        margin = (rule.x - a
                  + np.asarray(kernel.conditional_surplus(a, rule.z), dtype=float)
                  - np.asarray(kernel.conditional_surplus(a, rule.y), dtype=float))
        perform1 = margin >= -TIE_TOL
        b = np.asarray(kernel.sample_conditional(a, u[:, 1]), dtype=float)
        perform2 = np.where(perform1, b <= rule.z, b <= rule.y)
        code = perform1.astype(np.int64) + 2 * perform2.astype(np.int64)
        tallies += np.bincount(code, minlength=4)
        performances = (perform1.astype(np.int64) + perform2.astype(np.int64)).astype(float)
        sum_c += float(performances.sum())
        sum_c2 += float((performances * performances).sum())
    estimate = sum_c / n
    var = max(sum_c2 - sum_c * sum_c / n, 0.0) / max(n - 1, 1)
    stderr = float(np.sqrt(var / n))
    counts = Counts(
        neither=int(tallies[0]),
        period1_only=int(tallies[1]),
        period2_only=int(tallies[2]),
        both=int(tallies[3]),
    )
    dep = dependence_summary(kernel, n, seed) if with_dependence else None
    return SimulationReport(
        estimate=estimate, stderr=stderr, n=n, seed=seed, counts=counts,
        dependence=dep,
    )


DEFAULT_COMPARE_N = 1_000_000


def compare_to_analytic(kernel: CostKernel, rule: RewardRule,
                        n: int = DEFAULT_COMPARE_N, seed: int = 12345) -> dict:
    """Run quadrature and simulation on the same scheme; report the
    standardized discrepancy."""
    analytic = evaluate_scheme(kernel, rule).performance
    report = simulate(kernel, rule, n, seed)
    if report.stderr > 0:
        z = (report.estimate - analytic) / report.stderr
    else:
        z = 0.0 if abs(report.estimate - analytic) < 1e-12 else float("inf")
    return {"analytic": analytic, "mc": report, "z_score": float(z)}
