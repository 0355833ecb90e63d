"""Core model: reward rules, the agent's sequential best response, and scheme
evaluation by breakpoint-aware quadrature for arbitrary cost kernels.

Conventions used throughout:

* Period costs live on [0, 1] with uniform marginals; ``F(t) = clamp(t, 0, 1)``
  is the marginal CDF, applied to rewards that may exceed 1 when ``w > 1``.
* An indifferent agent performs.  Numerically a decision value within
  ``TIE_TOL`` of zero counts as a tie (deterministic conditional laws produce
  exact-zero decision margins up to rounding).
* ``performance`` is the expected number of performances over both periods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError
from .quadrature import adaptive_simpson, bisect_boundary, split_points

if TYPE_CHECKING:  # pragma: no cover
    from .kernels import CostKernel

#: decision values in [-TIE_TOL, +inf) count as "perform"
TIE_TOL = 1e-12

#: default absolute tolerance for scheme-evaluation quadrature
QUAD_TOL = 1e-9


def uniform_cdf(t):
    """Marginal CDF of a uniform cost: clamp(t, 0, 1).  Accepts arrays."""
    return np.clip(t, 0.0, 1.0)


def expected_surplus_uniform(t: float) -> float:
    """E[(t - B)+] for B uniform on [0, 1]: t^2/2 below 1, t - 1/2 above.

    This is the option value of a period-2 reward ``t`` before the cost is
    known.  Negative ``t`` is a domain error rather than silently 0 so that
    malformed rules fail loudly.
    """
    if t < 0:
        raise DomainError(f"surplus is defined for non-negative rewards, got {t}")
    return float(_phi(t))


def _phi(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1.0, 0.5 * t * t, t - 0.5)


@dataclass(frozen=True)
class RewardRule:
    """A reward rule (x, y, z) under budget w.

    x: paid for performing in period 1.
    y: paid for performing in period 2 after skipping period 1.
    z: incremental pay for a second performance (total x + z for both).

    Feasibility: all rewards non-negative, y <= w, and x + z <= w so no path
    through the two periods can pay out more than the budget.
    """

    x: float
    y: float
    z: float
    w: float

    def __post_init__(self):
        eps = 1e-12
        if self.w < 0:
            raise DomainError(f"budget must be non-negative, got w={self.w}")
        if self.x < -eps or self.y < -eps or self.z < -eps:
            raise DomainError(f"rewards must be non-negative: {self}")
        if self.y > self.w + eps:
            raise DomainError(f"y={self.y} exceeds the budget w={self.w}")
        if self.x + self.z > self.w + eps:
            raise DomainError(f"x + z = {self.x + self.z} exceeds the budget w={self.w}")

    def astuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class SchemeEvaluation:
    """Performance split by period plus the set of period-1 performers."""

    performance: float
    period1_mass: float
    period2_mass: float
    participation_set: tuple[tuple[float, float], ...]


def upper_bound(w: float) -> float:
    """Cap on performance: each period's performing mass is at most F(w)."""
    if w < 0:
        raise DomainError(f"budget must be non-negative, got w={w}")
    return 2.0 * min(w, 1.0)


def period1_threshold_iid(rule: RewardRule) -> float:
    """Period-1 cost threshold under independent uniform costs.

    The agent performs iff his cost is at most
    ``x + E[(z - B)+] - E[(y - B)+]``; for y, z <= 1 this reduces to
    ``(2x - y^2 + z^2) / 2``.  Returned unclamped; clamp to [0, 1] when
    converting to a performing mass.
    """
    return rule.x + expected_surplus_uniform(rule.z) - expected_surplus_uniform(rule.y)


def performance_iid(rule: RewardRule) -> SchemeEvaluation:
    """Closed-form scheme evaluation under independent uniform costs.

    performance = F(cbar) * (1 + F(z)) + (1 - F(cbar)) * F(y) with cbar from
    :func:`period1_threshold_iid`.
    """
    cbar = period1_threshold_iid(rule)
    m1 = float(uniform_cdf(cbar))
    m2 = m1 * float(uniform_cdf(rule.z)) + (1.0 - m1) * float(uniform_cdf(rule.y))
    participation = ((0.0, m1),) if m1 > 0.0 else ()
    return SchemeEvaluation(
        performance=m1 + m2,
        period1_mass=m1,
        period2_mass=m2,
        participation_set=participation,
    )


def agent_period1_decision(kernel: "CostKernel", rule: RewardRule, c: float) -> bool:
    """Whether an agent with period-1 cost ``c`` performs in period 1.

    Compares the expected continuation value of performing now,
    ``x - c + E[(z - B_c)+]``, against waiting, ``E[(y - B_c)+]``, where both
    expectations are over the kernel's conditional law of the period-2 cost
    given the realized period-1 cost.  Ties perform.
    """
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"period-1 cost must lie in [0, 1], got {c}")
    return bool(_decision_margin(kernel, rule, c) >= -TIE_TOL)


def agent_period2_decision(rule: RewardRule, performed1: bool, b: float) -> bool:
    """Whether the agent performs in period 2: B <= z after a period-1
    performance, B <= y otherwise.  Ties perform."""
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"period-2 cost must lie in [0, 1], got {b}")
    reward = rule.z if performed1 else rule.y
    return b <= reward


def _decision_margin(kernel, rule, c):
    s_z = float(kernel.conditional_surplus(c, rule.z))
    s_y = float(kernel.conditional_surplus(c, rule.y))
    return rule.x - c + s_z - s_y


def evaluate_scheme(kernel: "CostKernel", rule: RewardRule,
                    tol: float = QUAD_TOL) -> SchemeEvaluation:
    """Evaluate a scheme (kernel, rule) by quadrature over the period-1 cost.

    performance = integral over c of
    ``perform1(c) * (1 + P(B_c <= z)) + (1 - perform1(c)) * P(B_c <= y)``.

    The kernel reports the points where its conditional evaluators are
    non-smooth in c; within each resulting piece the decision margin changes
    sign at most a handful of times, and every sign flip is bracketed on a
    dense scan and located by bisection.  The integrand is then smooth on
    each final segment.
    """
    margin = lambda c: _decision_margin(kernel, rule, c)
    performs = lambda c: margin(c) >= -TIE_TOL

    base = split_points(0.0, 1.0, kernel.breakpoints((rule.y, rule.z)))
    cuts = list(base)
    for a, b in zip(base[:-1], base[1:]):
        cuts.extend(_decision_flips(performs, a, b))
    cuts = sorted(set(cuts))

    perform_segments: list[tuple[float, float]] = []
    period2 = 0.0
    n_segments = max(len(cuts) - 1, 1)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 0.0:
            continue
        if performs(0.5 * (a + b)):
            perform_segments.append((a, b))
            t = rule.z
        else:
            t = rule.y
        period2 += adaptive_simpson(
            lambda c: float(kernel.conditional_cdf(c, t)), a, b, tol / n_segments
        )

    period1 = sum(b - a for a, b in perform_segments)
    return SchemeEvaluation(
        performance=period1 + period2,
        period1_mass=period1,
        period2_mass=period2,
        participation_set=tuple(_merge(perform_segments)),
    )


def _decision_flips(performs, a, b, scan: int = 65):
    """Boundary points where the perform indicator flips inside (a, b)."""
    grid = np.linspace(a, b, scan)
    flags = [performs(float(c)) for c in grid]
    flips = []
    for i in range(scan - 1):
        if flags[i] != flags[i + 1]:
            flips.append(
                bisect_boundary(performs, float(grid[i]), float(grid[i + 1]))
            )
    return flips


def _merge(segments):
    merged: list[list[float]] = []
    for a, b in segments:
        if merged and abs(merged[-1][1] - a) < 1e-12:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]
