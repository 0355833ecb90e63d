import numpy as np
import pytest

from scheme_lab import (
    FgmKernel,
    IidKernel,
    ParameterError,
    RewardRule,
    compare_to_analytic,
    evaluate_scheme,
    make_purely_sufficient_kernel,
    make_purely_sustained_kernel,
    performance_iid,
    simulate,
)
from scheme_lab._rng import draw_uniforms

N = 200_000


class TestRngStream:
    def test_shard_invariance(self):
        whole = draw_uniforms(99, 0, 1000)
        parts = np.vstack([draw_uniforms(99, 0, 373), draw_uniforms(99, 373, 627)])
        assert np.array_equal(whole, parts)

    def test_seed_sensitivity(self):
        assert not np.array_equal(draw_uniforms(1, 0, 100), draw_uniforms(2, 0, 100))


class TestSimulate:
    def test_deterministic(self):
        r = RewardRule(0.4, 0.4, 0.0, 0.4)
        assert simulate(IidKernel(), r, 50_000, 7) == simulate(IidKernel(), r, 50_000, 7)

    def test_counts_identity(self):
        rep = simulate(FgmKernel(-0.5), RewardRule(0.1, 0.4, 0.5, 0.6), N, 3)
        c = rep.counts
        assert c.total() == rep.n
        expected = (c.period1_only + c.period2_only + 2 * c.both) / rep.n
        assert rep.estimate == pytest.approx(expected, abs=1e-12)

    def test_zero_rule_exact_zero(self):
        rep = simulate(IidKernel(), RewardRule(0.0, 0.0, 0.0, 0.0), 50_000, 13)
        assert rep.estimate == 0.0
        assert rep.counts.neither == rep.n

    def test_sample_floor(self):
        with pytest.raises(ParameterError):
            simulate(IidKernel(), RewardRule(0.1, 0.1, 0.0, 0.2), 0, 1)

    def test_sustained_scheme_hits_bound(self):
        rep = simulate(make_purely_sustained_kernel(0.9), RewardRule(0.0, 0.0, 0.9, 0.9), N, 5)
        assert abs(rep.estimate - 1.8) <= 3 * rep.stderr
        assert rep.counts.period1_only == 0  # every performer performs twice

    def test_iid_closed_form(self):
        rep = simulate(IidKernel(), RewardRule(0.4, 0.4, 0.0, 0.4), N, 17)
        assert abs(rep.estimate - 0.592) <= 3 * rep.stderr
        assert rep.counts.both == 0  # z = 0 never pays a second performance

    def test_dependence_attachment(self):
        rep = simulate(FgmKernel(-1.0), RewardRule(0.25, 0.25, 0.0, 0.25), 20_000, 9,
                       with_dependence=True)
        assert rep.dependence is not None
        assert rep.dependence["spearman"] == pytest.approx(-1 / 3, abs=0.03)


class TestCompareToAnalytic:
    def test_fgm_negative_dependence(self):
        res = compare_to_analytic(FgmKernel(-1.0), RewardRule(0.5, 0.5, 0.0, 0.5), n=N, seed=23)
        assert abs(res["z_score"]) <= 3
        assert res["analytic"] == pytest.approx(0.7560586734693877, abs=1e-6)

    def test_sufficient_construction(self):
        res = compare_to_analytic(
            make_purely_sufficient_kernel(0.4), RewardRule(0.4, 0.4, 0.0, 0.4), n=N, seed=29
        )
        assert res["analytic"] == pytest.approx(0.8, abs=1e-6)
        assert abs(res["z_score"]) <= 3

    def test_dual_optimum_rule(self):
        res = compare_to_analytic(IidKernel(), RewardRule(2 / 3, 1.0, 1 / 3, 1.0), n=N, seed=31)
        assert res["analytic"] == pytest.approx(29 / 27, abs=1e-6)
        assert abs(res["z_score"]) <= 3

    def test_regression_grid(self):
        cases = [
            (IidKernel(), RewardRule(0.3, 0.6, 0.4, 0.7)),
            (IidKernel(), RewardRule(0.0, 0.2, 1.2, 1.2)),
            (FgmKernel(-1.0), RewardRule(0.0, 0.0, 0.8, 0.8)),
            (FgmKernel(0.6), RewardRule(0.45, 0.3, 0.45, 0.9)),
            (make_purely_sufficient_kernel(0.25), RewardRule(0.25, 0.25, 0.0, 0.25)),
            (make_purely_sustained_kernel(0.5), RewardRule(0.0, 0.0, 0.5, 0.5)),
            (make_purely_sustained_kernel(1.0), RewardRule(0.1, 0.3, 0.9, 1.0)),
        ]
        for kernel, rule in cases:
            res = compare_to_analytic(kernel, rule, n=N, seed=37)
            assert abs(res["z_score"]) <= 4, (kernel.description, rule)


class TestAgainstClosedForm:
    def test_simulator_never_peeks_at_period2(self):
        # the period-1 decision uses conditional expectations, so under
        # independence the share of period-1 performers equals the closed-form
        # threshold even when the realized period-2 draw is extreme
        rule = RewardRule(0.25, 0.9, 0.65, 0.9)
        rep = simulate(IidKernel(), rule, N, 41)
        m1 = (rep.counts.period1_only + rep.counts.both) / rep.n
        cbar = performance_iid(rule).period1_mass
        assert abs(m1 - cbar) <= 4 * np.sqrt(cbar * (1 - cbar) / rep.n)

    def test_matches_quadrature_for_grid_free_kernels(self):
        rule = RewardRule(0.2, 0.5, 0.3, 0.5)
        for kernel in (IidKernel(), FgmKernel(0.4)):
            rep = simulate(kernel, rule, N, 43)
            quad = evaluate_scheme(kernel, rule).performance
            assert abs(rep.estimate - quad) <= 3.5 * rep.stderr
