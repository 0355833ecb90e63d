import math

import numpy as np
import pytest

from scheme_lab import (
    W_HIGH,
    W_LOW,
    DomainError,
    FgmKernel,
    IidKernel,
    Regime,
    RegimeError,
    RewardRule,
    evaluate_scheme,
    fgm_rule_performance,
    fgm_sufficient_performance,
    fgm_sustained_performance,
    objective_partials,
    optimal_rule_iid,
    optimal_second_increment,
    optimal_skip_reward,
    performance_iid,
    regime,
    skip_reward_unclamped,
)


class TestIncrementAndSkipFormulas:
    def test_exact_values(self):
        assert optimal_second_increment(1.0) == pytest.approx(1 / 3, abs=1e-15)
        assert optimal_skip_reward(1.0) == pytest.approx(1 / 3, abs=1e-15)
        assert skip_reward_unclamped(1.0) == pytest.approx(1 / 3, abs=1e-15)

    def test_boundaries_are_roots(self):
        assert abs(optimal_second_increment(W_LOW)) <= 1e-12
        assert abs(skip_reward_unclamped(W_HIGH)) <= 1e-12
        assert abs(optimal_skip_reward(1.5)) <= 1e-12

    def test_monotone(self):
        inc = [optimal_second_increment(w) for w in (0.7, 0.8, 0.9)]
        assert inc[0] < inc[1] < inc[2]
        assert all(0 < v < 1 / 3 for v in inc)
        for profile in (optimal_skip_reward, skip_reward_unclamped):
            skip = [profile(w) for w in (1.1, 1.2, 1.3)]
            assert skip[0] > skip[1] > skip[2]
            assert all(0 < v < 1 / 3 for v in skip)

    def test_skip_reward_is_the_interior_stationary_point(self):
        # with any z >= 1 and x = w - z the threshold is w - 1/2 - y^2/2;
        # the skip reward must zero the performance derivative there
        for w in (1.05, 1.2, 1.45):
            y = optimal_skip_reward(w)
            assert 1.5 * y * y - 2.0 * y + (1.5 - w) == pytest.approx(0.0, abs=1e-12)

    def test_unclamped_profile_stays_below_exact(self):
        for w in (1.05, 1.2, 1.4):
            assert skip_reward_unclamped(w) < optimal_skip_reward(w)
            assert optimal_skip_reward(w) - skip_reward_unclamped(w) < 0.05

    def test_domains(self):
        with pytest.raises(DomainError):
            optimal_second_increment(0.5)
        with pytest.raises(DomainError):
            optimal_skip_reward(0.9)
        with pytest.raises(DomainError):
            skip_reward_unclamped(1.45)


class TestOptimalRule:
    def test_low_budget(self):
        best = optimal_rule_iid(0.5)
        assert best.rules[0].astuple() == pytest.approx((0.5, 0.5, 0.0))
        assert best.equivalence_class is None

    def test_mid_low_band(self):
        best = optimal_rule_iid(0.8).rules[0]
        q = optimal_second_increment(0.8)
        assert best.astuple() == pytest.approx((0.8 - q, 0.8, q))

    def test_unit_budget_has_two_optima(self):
        best = optimal_rule_iid(1.0)
        assert len(best.rules) == 2
        assert best.rules[0].astuple() == pytest.approx((2 / 3, 1.0, 1 / 3))
        assert best.rules[1].astuple() == pytest.approx((0.0, 1 / 3, 1.0))
        # canonical pick is the smaller (z, y)
        assert best.rules[0].z < best.rules[1].z

    def test_mid_high_band(self):
        best = optimal_rule_iid(1.2)
        assert best.rules[0].astuple() == pytest.approx((0.0, optimal_skip_reward(1.2), 1.2))
        assert best.equivalence_class is not None

    def test_high_budget_keeps_small_skip_reward(self):
        best = optimal_rule_iid(1.45)
        y = best.rules[0].y
        assert best.rules[0].x == 0.0 and best.rules[0].z == 1.45
        assert 0.0 < y < 0.03
        # dropping the skip reward entirely costs a little performance
        assert (
            performance_iid(best.rules[0]).performance
            > performance_iid(RewardRule(0.0, 0.0, 1.45, 1.45)).performance
        )

    def test_trivial_regime_rejected(self):
        with pytest.raises(RegimeError):
            optimal_rule_iid(1.5)

    @pytest.mark.parametrize("w", [0.2, 0.5, 0.8, 1.0, 1.2, 1.45])
    def test_beats_dense_grid(self, w):
        grid = np.linspace(0.0, w, 201)
        zz, yy = np.meshgrid(grid, grid, indexing="ij")
        perf = fgm_rule_performance(w - zz, yy, zz, 0.0)
        best = optimal_rule_iid(w)
        target = performance_iid(best.rules[0]).performance
        assert target >= perf.max() - 1e-9
        # every near-optimal grid point sits next to a closed-form optimum
        cell = w / 200
        near = np.argwhere(perf >= perf.max() - 1e-6)
        for iz, iy in near:
            gy, gz = grid[iy], grid[iz]
            if w > 1.0:
                ok = abs(gy - best.rules[0].y) <= cell + 1e-9 and gz >= 1.0 - cell - 1e-9
            else:
                ok = any(
                    abs(gy - r.y) <= cell + 1e-9 and abs(gz - r.z) <= cell + 1e-9
                    for r in best.rules
                )
            assert ok, f"stray near-optimum at y={gy}, z={gz} for w={w}"


class TestRegime:
    @pytest.mark.parametrize(
        "w,label",
        [
            (0.3, Regime.PURELY_SUFFICIENT),
            (0.9, Regime.PARTIALLY_SUFFICIENT),
            (1.2, Regime.PARTIALLY_SUSTAINED),
            (1.45, Regime.PURELY_SUSTAINED),
        ],
    )
    def test_labels(self, w, label):
        assert regime(w) == label

    def test_boundaries_exact(self):
        assert regime(W_LOW - 1e-9) == Regime.PURELY_SUFFICIENT
        assert regime(W_LOW + 1e-9) == Regime.PARTIALLY_SUFFICIENT
        assert regime(W_HIGH - 1e-9) == Regime.PARTIALLY_SUSTAINED
        assert regime(W_HIGH + 1e-9) == Regime.PURELY_SUSTAINED
        assert W_LOW == pytest.approx(2 - math.sqrt(2), abs=0)
        assert W_HIGH == pytest.approx(math.sqrt(2), abs=0)


def _fd_partials(w, y, z, h=1e-5):
    def perf(x_, y_, z_):
        return performance_iid(RewardRule(x_, y_, z_, w)).performance

    x = w - z
    dy = (perf(x, y + h, z) - perf(x, y - h, z)) / (2 * h)
    dz = (perf(w - (z + h), y, z + h) - perf(w - (z - h), y, z - h)) / (2 * h)
    return dy, dz


class TestObjectivePartials:
    def test_equal_rewards_cancel(self):
        for x, y in ((0.1, 0.3), (0.5, 0.5), (0.0, 0.9)):
            dy, dz = objective_partials(x, y, y)
            assert dy + dz == pytest.approx(0.0, abs=1e-15)

    def test_gap_squared(self):
        dy, dz = objective_partials(0.5, 0.2, 0.5)
        assert dy + dz == pytest.approx(0.09, abs=1e-15)

    def test_first_performance_rule_gains_from_skip_reward(self):
        for w in (0.3, 0.6, 0.9):
            dy, _ = objective_partials(w, 0.0, 0.0)
            assert dy == pytest.approx(1.0 - w)
            assert dy > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            objective_partials(0.2, 1.2, 0.5)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 40:
            w = rng.uniform(0.2, 1.45)
            hi = min(w, 1.0) - 0.05
            if hi <= 0.06:
                continue
            y = rng.uniform(0.05, hi)
            z = rng.uniform(0.05, min(hi, w - 0.02))
            cbar = (w - z) + 0.5 * z * z - 0.5 * y * y
            if not 0.02 < cbar < 0.98:
                continue
            dy, dz = objective_partials(w - z, y, z)
            fy, fz = _fd_partials(w, y, z)
            assert dy == pytest.approx(fy, abs=1e-6)
            assert dz == pytest.approx(fz, abs=1e-6)
            checked += 1


class TestFgmClosedForms:
    def test_sufficient_independence_reduction(self):
        res = fgm_sufficient_performance(0.5, 0.0)
        assert res.threshold == pytest.approx(0.375)
        assert res.performance == pytest.approx(0.6875)
        closed = performance_iid(RewardRule(0.5, 0.5, 0.0, 0.5)).performance
        assert res.performance == pytest.approx(closed, abs=1e-12)

    def test_sufficient_saturates_above_one(self):
        for theta in (-1.0, 0.0, 0.7):
            res = fgm_sufficient_performance(1.2, theta)
            assert res.performance == 1.0
            quad = evaluate_scheme(FgmKernel(theta), RewardRule(1.2, 1.2, 0.0, 1.2))
            assert quad.performance == pytest.approx(1.0, abs=1e-6)

    def test_sufficient_prefers_negative_dependence(self):
        lo = fgm_sufficient_performance(0.5, -1.0).performance
        hi = fgm_sufficient_performance(0.5, 1.0).performance
        assert lo > hi

    def test_sustained_independence_reduction(self):
        res = fgm_sustained_performance(0.8, 0.0)
        assert res.threshold == pytest.approx(0.32)
        assert res.performance == pytest.approx(0.576)

    def test_sustained_above_one(self):
        res = fgm_sustained_performance(1.2, 0.0)
        assert res.threshold == pytest.approx(0.7)
        assert res.performance == pytest.approx(1.4)
        quad = evaluate_scheme(IidKernel(), RewardRule(0.0, 0.0, 1.2, 1.2))
        assert quad.performance == pytest.approx(1.4, abs=1e-6)

    def test_sustained_threshold_continuous_at_one(self):
        for theta in (-1.0, -0.2, 0.6, 1.0):
            assert fgm_sustained_performance(1.0, theta).threshold == pytest.approx(0.5)
            below = fgm_sustained_performance(1.0 - 1e-9, theta).threshold
            assert below == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("w", [0.3, 0.8, 1.2])
    @pytest.mark.parametrize("theta", [-1.0, -0.3, 0.4, 1.0])
    def test_extreme_rules_match_quadrature(self, w, theta):
        kernel = FgmKernel(theta)
        suff = fgm_sufficient_performance(w, theta).performance
        quad_suff = evaluate_scheme(kernel, RewardRule(w, w, 0.0, w)).performance
        assert suff == pytest.approx(quad_suff, abs=1e-6)
        sust = fgm_sustained_performance(w, theta).performance
        quad_sust = evaluate_scheme(kernel, RewardRule(0.0, 0.0, w, w)).performance
        assert sust == pytest.approx(quad_sust, abs=1e-6)

    def test_general_rule_matches_quadrature(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            w = rng.uniform(0.1, 1.45)
            theta = rng.uniform(-1, 1)
            z = rng.uniform(0, w)
            x = rng.uniform(0, w - z)
            y = rng.uniform(0, min(w, 1.0))
            closed = float(fgm_rule_performance(x, y, z, theta))
            quad = evaluate_scheme(FgmKernel(theta), RewardRule(x, y, z, w)).performance
            assert closed == pytest.approx(quad, abs=1e-6)

    def test_domains(self):
        with pytest.raises(DomainError):
            fgm_sufficient_performance(1.5, 0.0)
        with pytest.raises(DomainError):
            fgm_sustained_performance(0.5, 1.5)
