import numpy as np
import pytest

from scheme_lab import (
    ParameterError,
    SearchConfig,
    optimal_rule_iid,
    optimize_fgm,
    optimize_rule_iid,
    performance_iid,
    sweep,
    upper_bound,
)

FAST = SearchConfig(coarse_step=0.02, theta_step=0.1)


class TestOptimizeIid:
    def test_low_budget_corner(self):
        res = optimize_rule_iid(0.5)
        assert res.rule.astuple() == pytest.approx((0.5, 0.5, 0.0), abs=1e-9)
        assert res.performance == pytest.approx(0.6875, abs=1e-12)
        assert res.converged

    def test_unit_budget_value(self):
        res = optimize_rule_iid(1.0)
        assert res.performance == pytest.approx(29 / 27, abs=1e-6)

    def test_zero_budget(self):
        res = optimize_rule_iid(0.0)
        assert res.rule.astuple() == (0.0, 0.0, 0.0)
        assert res.performance == 0.0

    def test_high_budget_canonical_representative(self):
        res = optimize_rule_iid(1.2)
        assert res.rule.x == pytest.approx(0.0, abs=1e-12)
        assert res.rule.z == pytest.approx(1.2, abs=1e-12)

    @pytest.mark.parametrize("w", [0.2, 0.45, 0.7, 0.9, 1.1, 1.3, 1.45])
    def test_matches_closed_form_rule(self, w):
        res = optimize_rule_iid(w)
        best = optimal_rule_iid(w).rules[0]
        assert res.performance == pytest.approx(
            performance_iid(best).performance, abs=1e-8
        )
        assert res.rule.y == pytest.approx(best.y, abs=2e-3)
        if w <= 1.0:
            assert res.rule.z == pytest.approx(best.z, abs=2e-3)

    def test_matches_closed_form_values_random(self):
        rng = np.random.default_rng(101)
        for w in rng.uniform(0.05, 1.49, size=20):
            res = optimize_rule_iid(float(w), FAST)
            target = performance_iid(optimal_rule_iid(float(w)).rules[0]).performance
            assert res.performance == pytest.approx(target, abs=1e-5)

    def test_deterministic(self):
        a = optimize_rule_iid(0.77)
        b = optimize_rule_iid(0.77)
        assert a == b

    def test_respects_bound(self):
        for w in (0.3, 0.9, 1.3):
            assert optimize_rule_iid(w).performance <= upper_bound(w) + 1e-6


class TestOptimizeFgm:
    def test_negative_dependence_optimal_low_budget(self):
        assert optimize_fgm(0.5).theta == -1.0

    def test_negative_dependence_optimal_high_budget(self):
        assert optimize_fgm(1.2).theta == -1.0

    def test_interior_theta_mid_band(self):
        res = optimize_fgm(0.93)
        assert -1.0 < res.theta < 1.0
        base = optimize_rule_iid(0.93)
        assert res.performance - base.performance <= 0.01

    def test_dominates_independent_search(self):
        rng = np.random.default_rng(55)
        for w in rng.uniform(0.1, 1.45, size=6):
            joint = optimize_fgm(float(w), FAST)
            base = optimize_rule_iid(float(w), FAST)
            assert joint.performance >= base.performance - 1e-9

    def test_deterministic(self):
        assert optimize_fgm(0.88, FAST) == optimize_fgm(0.88, FAST)

    def test_rejects_nonpositive_budget(self):
        with pytest.raises(Exception):
            optimize_fgm(0.0)


class TestSweep:
    def test_single_point(self):
        rows = sweep(0.5, 0.51, 0.01, "iid")
        assert len(rows) == 1
        res = optimize_rule_iid(0.5)
        assert rows[0].w == 0.5
        assert rows[0].performance == res.performance
        assert rows[0].theta is None

    def test_half_open_range(self):
        rows = sweep(0.2, 0.4, 0.05, "iid", FAST)
        assert [r.w for r in rows] == pytest.approx([0.2, 0.25, 0.3, 0.35])

    def test_theta_zero_mode(self):
        rows = sweep(0.5, 0.52, 0.01, "fgm_theta_zero", FAST)
        assert rows[0].theta == 0.0
        assert rows[0].performance == pytest.approx(0.6875, abs=1e-9)

    def test_fgm_mode_reports_theta(self):
        rows = sweep(0.3, 0.33, 0.01, "fgm", FAST)
        assert all(r.theta == -1.0 for r in rows)

    def test_step_validation(self):
        with pytest.raises(ParameterError):
            sweep(0.1, 0.5, 0.0, "iid")

    def test_mode_validation(self):
        with pytest.raises(ParameterError):
            sweep(0.1, 0.5, 0.1, "nope")

    def test_range_validation(self):
        with pytest.raises(ParameterError):
            sweep(0.5, 0.2, 0.1, "iid")
        with pytest.raises(ParameterError):
            sweep(0.5, 1.6, 0.1, "iid")

    def test_parallel_matches_serial(self, monkeypatch):
        serial = sweep(0.3, 0.5, 0.05, "iid", FAST)
        monkeypatch.setenv("SCHEME_LAB_THREADS", "4")
        parallel = sweep(0.3, 0.5, 0.05, "iid", FAST)
        assert serial == parallel

    def test_rule_shape_over_budgets(self):
        # second-performance pay is zero for small budgets, grows on the
        # mid band, and the skip reward decays above one
        rows = {r.w: r for r in sweep(0.2, 1.45, 0.25, "iid")}
        assert rows[0.2].z == pytest.approx(0.0, abs=1e-9)
        assert rows[0.2].y == pytest.approx(0.2, abs=1e-9)
        assert 0.0 < rows[0.7].z < rows[0.95].z
        assert rows[1.2].z == pytest.approx(1.2, abs=1e-9)
        assert rows[1.2].y < rows[0.95].y


class TestSearchConfig:
    def test_validation(self):
        with pytest.raises(ParameterError):
            SearchConfig(coarse_step=0.0)
        with pytest.raises(ParameterError):
            SearchConfig(refine_tolerance=-1.0)
