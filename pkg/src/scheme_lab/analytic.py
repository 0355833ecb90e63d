"""Closed-form results for the independent benchmark and the FGM family.

Under independent uniform costs the optimal rule is piecewise in the budget,
switching from rewarding the first performance to rewarding the second as w
grows.  Below w = 1 the interior piece is driven by a square-root expression
whose root 2 - sqrt(2) starts the band; above w = 1 the optimal skip reward
follows its own square-root law, positive all the way to w = 3/2.  The
regime taxonomy keeps sqrt(2) as the nominal purely-sustained boundary (the
root of the unclamped skip profile); 0.6 and 1.4 are rounded display values.

Under FGM dependence the period-1 decision margin is linear in the period-1
cost, so thresholds and performance levels have closed forms for arbitrary
rules; the two extreme rules get dedicated helpers exposing their thresholds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, RegimeError
from .model import RewardRule

#: budget where the optimal incremental second-performance reward turns positive
W_LOW = 2.0 - math.sqrt(2.0)
#: nominal purely-sustained boundary: root of the unclamped skip profile
W_HIGH = math.sqrt(2.0)

REGIME_BOUNDARIES = (W_LOW, W_HIGH)


class Regime(str, enum.Enum):
    PURELY_SUFFICIENT = "purely_sufficient"
    PARTIALLY_SUFFICIENT = "partially_sufficient"
    PARTIALLY_SUSTAINED = "partially_sustained"
    PURELY_SUSTAINED = "purely_sustained"


def _check_budget(w: float):
    if not 0.0 <= w < 1.5:
        raise RegimeError(
            f"closed forms cover 0 <= w < 3/2; w={w} lies in the trivial "
            f"full-performance regime (pay the whole budget for two performances)"
        )


def regime(w: float) -> Regime:
    """Label the budget by which reward component the optimum emphasizes."""
    _check_budget(w)
    if w < W_LOW:
        return Regime.PURELY_SUFFICIENT
    if w < 1.0:
        return Regime.PARTIALLY_SUFFICIENT
    if w < W_HIGH:
        return Regime.PARTIALLY_SUSTAINED
    return Regime.PURELY_SUSTAINED


def optimal_second_increment(w: float) -> float:
    """Optimal incremental second-performance reward on the mid-low band:
    (w + 1 - 2*sqrt(w^2 - 2.5w + 1.75)) / 3, non-negative on [2 - sqrt(2), 1]."""
    if not W_LOW - 1e-12 <= w <= 1.0 + 1e-12:
        raise DomainError(
            f"the increment formula is non-negative only for w in "
            f"[{W_LOW:.6f}, 1], got {w}"
        )
    return (w + 1.0 - 2.0 * math.sqrt(w * w - 2.5 * w + 1.75)) / 3.0


def optimal_skip_reward(w: float) -> float:
    """Optimal skip-then-perform reward once the whole budget rides on the
    second performance (any z >= 1 with x + z = w): the interior root of
    3y^2 - 4y + (3 - 2w) = 0, i.e. (2 - sqrt(6w - 5)) / 3.

    Strictly positive below w = 3/2 (the marginal value of a small skip
    reward is the mass of period-1 non-performers, 3/2 - w) and decays from
    1/3 at w = 1 to 0 at w = 3/2.
    """
    if not 1.0 - 1e-12 <= w <= 1.5 + 1e-12:
        raise DomainError(f"the skip reward applies to budgets in [1, 3/2], got {w}")
    return (2.0 - math.sqrt(6.0 * w - 5.0)) / 3.0


def skip_reward_unclamped(w: float) -> float:
    """Skip-reward profile with the period-2 performing probability left
    unclamped: (w + 1 - 2*sqrt(w^2 + 0.5w - 1.25)) / 3 on [1, sqrt(2)].

    This variant treats P(B <= z) as z even for z = w > 1, so it reaches
    zero at sqrt(2) rather than 3/2; its root is the purely-sustained
    boundary used by :func:`regime`.  The exact profile is
    :func:`optimal_skip_reward`; the two agree at w = 1 and differ by less
    than 0.05 on the band.
    """
    if not 1.0 - 1e-12 <= w <= W_HIGH + 1e-12:
        raise DomainError(
            f"the unclamped profile is non-negative only for w in "
            f"[1, {W_HIGH:.6f}], got {w}"
        )
    return (w + 1.0 - 2.0 * math.sqrt(w * w + 0.5 * w - 1.25)) / 3.0


@dataclass(frozen=True)
class OptimalRules:
    """Closed-form optimum: one rule, or two at the crossover budget w = 1.

    For w > 1 every rule (w - z, y*, z) with z >= 1 performs identically;
    ``rules`` then holds the canonical representative (0, y*, w) and
    ``equivalence_class`` describes the rest.  Rules are ordered by (z, y),
    smallest first, so ``rules[0]`` is the canonical pick.
    """

    rules: tuple[RewardRule, ...]
    equivalence_class: str | None = None


def optimal_rule_iid(w: float) -> OptimalRules:
    """The performance-maximizing rule(s) under independent uniform costs."""
    _check_budget(w)
    if w <= W_LOW:
        return OptimalRules((RewardRule(w, w, 0.0, w),))
    if w < 1.0:
        q = optimal_second_increment(w)
        return OptimalRules((RewardRule(w - q, w, q, w),))
    if w == 1.0:
        return OptimalRules(
            (
                RewardRule(2.0 / 3.0, 1.0, 1.0 / 3.0, 1.0),
                RewardRule(0.0, 1.0 / 3.0, 1.0, 1.0),
            )
        )
    y_star = optimal_skip_reward(w)
    return OptimalRules(
        (RewardRule(0.0, y_star, w, w),),
        equivalence_class=f"(w - z, {y_star:.12g}, z) for any z in [1, w]",
    )


def objective_partials(x: float, y: float, z: float) -> tuple[float, float]:
    """Partial derivatives of performance in (y, z) along the exhausted budget.

    Valid for y, z <= 1 with the period-1 threshold interior.  The y
    derivative holds x fixed; the z derivative moves along x + z = const.
    Their sum collapses to (z - y)^2, which is what makes corner rules
    optimal away from y = z.
    """
    if y > 1.0 or z > 1.0 or y < 0.0 or z < 0.0:
        raise DomainError(f"partials are valid only for y, z in [0, 1], got y={y}, z={z}")
    cbar = 0.5 * (2.0 * x - y * y + z * z)
    dy = 1.0 - cbar - y * (1.0 + z - y)
    dz = cbar - (1.0 - z) * (1.0 + z - y)
    return dy, dz


class ThresholdPerformance(NamedTuple):
    threshold: float
    performance: float


def _check_theta(theta: float):
    if not -1.0 <= theta <= 1.0:
        raise DomainError(f"dependence parameter must lie in [-1, 1], got {theta}")


def fgm_sufficient_performance(w: float, theta: float) -> ThresholdPerformance:
    """Threshold and performance of the rule (w, w, 0) under FGM dependence.

    The period-1 margin w - c and the waiting value are both linear in c, so
    the threshold solves a linear equation; no type above 1/2 ever performs
    in period 1 (waiting dominates once the expected period-2 cost falls
    below c).  For w >= 1 every non-performer performs in period 2, pinning
    performance at 1.
    """
    if not 0.0 < w < 1.5:
        raise DomainError(f"need 0 < w < 3/2, got {w}")
    _check_theta(theta)
    if w >= 1.0:
        return ThresholdPerformance(0.5, 1.0)
    k = theta * (0.5 * w * w - w ** 3 / 3.0)
    c = (w - 0.5 * w * w - k) / (1.0 - 2.0 * k)
    c = min(max(c, 0.0), 0.5)
    perf = c + w * (1.0 - c) - theta * w * (1.0 - w) * c * (1.0 - c)
    return ThresholdPerformance(c, perf)


def fgm_sustained_performance(w: float, theta: float) -> ThresholdPerformance:
    """Threshold and performance of the rule (0, 0, w) under FGM dependence.

    Below w = 1 the threshold is
    (3w^2 + 3*theta*w^2 - 2*theta*w^3) / (2*(3 + 3*theta*w^2 - 2*theta*w^3));
    above it, (theta + 6w - 3) / (2*(theta + 3)) capped at 1, where every
    period-1 performer also performs in period 2 so performance is twice the
    threshold.
    """
    if not 0.0 < w < 1.5:
        raise DomainError(f"need 0 < w < 3/2, got {w}")
    _check_theta(theta)
    if w < 1.0:
        a = 3.0 * theta * w * w - 2.0 * theta * w ** 3
        c = 0.5 * (3.0 * w * w + a) / (3.0 + a)
        perf = c * (1.0 + w) + theta * w * (1.0 - w) * c * (1.0 - c)
        return ThresholdPerformance(c, perf)
    c = min(0.5 * (theta + 6.0 * w - 3.0) / (theta + 3.0), 1.0)
    return ThresholdPerformance(c, 2.0 * c)


def _phi(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1.0, 0.5 * t * t, t - 0.5)


def _psi(t):
    u = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 0.5 * u * u - u ** 3 / 3.0


def fgm_rule_performance(x, y, z, theta):
    """Closed-form performance of an arbitrary rule under FGM dependence.

    The conditional surplus at reward t is phi(t) + theta*(1-2c)*psi(t), so
    the period-1 threshold is

        c* = (x + dphi + theta*dpsi) / (1 + 2*theta*dpsi),

    with dphi, dpsi the surplus gaps between z and y (the denominator stays
    positive since |2*theta*dpsi| <= 1/3).  Integrating the conditional CDFs
    on either side of c* gives

        c*(1 + F(z)) + (1 - c*)F(y)
          + theta*c*(1 - c*)(F(z)(1 - F(z)) - F(y)(1 - F(y))).

    Vectorized over any broadcastable mix of arguments; theta = 0 reduces to
    the independent closed form.
    """
    x = np.asarray(x, dtype=float)
    dphi = _phi(z) - _phi(y)
    dpsi = _psi(z) - _psi(y)
    c = np.clip((x + dphi + theta * dpsi) / (1.0 + 2.0 * theta * dpsi), 0.0, 1.0)
    ty = np.clip(y, 0.0, 1.0)
    tz = np.clip(z, 0.0, 1.0)
    return (
        c * (1.0 + tz)
        + (1.0 - c) * ty
        + theta * c * (1.0 - c) * (tz * (1.0 - tz) - ty * (1.0 - ty))
    )
