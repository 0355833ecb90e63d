"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line.  Run with ``pytest tests/test_acceptance.py -s`` (or via
``scheme-lab verify --suite all``, which drives the same checks)."""

import pytest

from scheme_lab import verify

CRITERIA = [
    ("closed-form-optimum-vs-201x201-grid", verify.check_optimal_rule_grid),
    ("dual-optimum-at-unit-budget", verify.check_dual_optimum),
    ("derivative-identity-gap-squared", verify.check_derivative_identity),
    ("theta-monotonicity-extreme-rules", verify.check_fgm_monotonicity),
    ("joint-optimum-theta-star-shape", verify.check_joint_optimum_shape),
    ("constructions-reach-2w", verify.check_constructions_reach_bound),
    ("sustained-conditional-dependence", verify.check_sustained_dependence),
    ("marginal-uniformity-all-kernels", verify.check_marginal_uniformity),
    ("fgm-spearman-theta-thirds", verify.check_fgm_spearman),
    ("performance-bounds", verify.check_performance_bounds),
]


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(label, check, capsys):
    result = check()
    with capsys.disabled():
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {label}: {result.detail}")
    assert result.passed, f"{label}: {result.detail}"
