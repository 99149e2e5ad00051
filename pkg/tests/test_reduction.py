"""Reduction identity, closed-form q-conditions, and the general solver."""

import numpy as np
import pytest

from heunx import (HeunParams, NoSolutionError, PreconditionError,
                   ReductionCase, ValidatedHeunParams, ValidationError,
                   case_to_dict, degree_claim_defect, delta_for_reduction,
                   identity_lhs, identity_scale, leading_difference,
                   q_candidates_N0, q_candidates_N1, q_candidates_N2,
                   q_for_N0, solve_reduction_general, verify_reduction)
from heunx.reduction import (DegenerateConstraintWarning, NoRealRootWarning,
                             _cubic_q_coeffs, _quadratic_q_coeffs)

ANCHOR = ValidatedHeunParams(a=2.0, q=4.0, alpha=3.0, beta=2.0, gamma=1.0,
                             delta=2.0, epsilon=3.0)

# order-1 draw whose q-condition has two real roots
N1_DRAW = (2.0, 0.5, 1.7, 0.6)
# order-1 draw with a negative discriminant: no real reduction exists
N1_NO_ROOT = (-0.5, 0.2, 0.1, 2.0)
# order-2 draw where one root hits the degenerate e-product relation (K = 1)
N2_DRAW = (2.0, 2.5, 1.7, 0.6)


def scaled(p, es, n):
    return max(identity_scale(p, es, n), 1.0)


def test_identity_vanishes_for_anchor_everywhere():
    # the reduction identity holds for all n, integer or not
    for n in (1.0, 2.0, 3.0, 7.3):
        assert abs(identity_lhs(ANCHOR, (), n)) <= 1e-12 * scaled(ANCHOR, (), n)


def test_identity_detects_wrong_q():
    p = HeunParams(**{**ANCHOR.as_dict(), "q": 5.0})
    assert abs(identity_lhs(p, (), 1.0)) > 1e-3


def test_delta_for_reduction():
    assert [delta_for_reduction(n) for n in (0, 1, 2)] == [2.0, 3.0, 4.0]
    with pytest.raises(PreconditionError):
        delta_for_reduction(-1)


def test_q_for_N0_values():
    assert q_for_N0(2.0, 3.0, 2.0, 1.0) == 4.0
    assert q_for_N0(0.5, 1.0, 1.0, 0.0) == 0.0
    assert q_for_N0(-2.0, 1.0, 3.0, 1.0) == -2.0


def test_N0_case_matches_anchor():
    case, = q_candidates_N0(2.0, 3.0, 2.0, 1.0)
    assert case.N == 0 and case.e_list == ()
    assert case.params == ANCHOR
    assert case.report.passed


def test_N1_roots_satisfy_quadratic():
    cases = q_candidates_N1(*N1_DRAW)
    assert len(cases) == 2
    coeffs = _quadratic_q_coeffs(*N1_DRAW)
    qs = [c.params.q for c in cases]
    assert qs == sorted(qs)
    assert [c.q_root_index for c in cases] == [0, 1]
    for case in cases:
        q = case.params.q
        resid = abs(np.polyval(coeffs, q))
        scale = max(1.0, abs(coeffs[1] * q), abs(coeffs[2]))
        assert resid <= 1e-10 * scale
        a, alpha, beta, gamma = N1_DRAW
        e1 = -q + a * (1.0 + gamma) - 1.0 + (alpha - 1.0) * (beta - 1.0)
        assert case.e_list == pytest.approx((e1,), rel=1e-12)


def test_N1_negative_discriminant_warns_empty():
    with pytest.warns(NoRealRootWarning):
        assert q_candidates_N1(*N1_NO_ROOT) == []


def test_perturbed_q_fails_verification():
    case = q_candidates_N1(*N1_DRAW)[0]
    p = HeunParams(**{**case.params.as_dict(), "q": case.params.q + 1e-3})
    report = verify_reduction(p, case.e_list)
    assert not report.passed


def test_N2_roots_satisfy_cubic_and_e_relations():
    a, alpha, beta, gamma = N2_DRAW
    with pytest.warns(DegenerateConstraintWarning):
        cases = q_candidates_N2(*N2_DRAW)
    assert 1 <= len(cases) <= 3
    coeffs = _cubic_q_coeffs(*N2_DRAW)
    for case in cases:
        q = case.params.q
        resid = abs(np.polyval(coeffs, q))
        scale = max(abs(c) * abs(q) ** (3 - i) for i, c in enumerate(coeffs))
        assert resid <= 1e-9 * max(scale, 1.0)
        e1, e2 = case.e_list
        s = -q + a * (2.0 + gamma) - 3.0 + (alpha - 1.0) * (beta - 1.0)
        k = ((-q + a * (alpha - 3.0) * (beta - 3.0) + 3.0 * a * gamma)
             / ((a - 1.0) * (alpha - 3.0) * (beta - 3.0)))
        assert e1 + e2 == pytest.approx(s, rel=1e-10, abs=1e-10)
        assert (e1 + 1.0) * (e2 + 1.0) / (e1 * e2) == pytest.approx(k, rel=1e-10)


@pytest.mark.parametrize("args", [
    (2.0, 3.0, 1.7, 0.6),   # alpha = 3
    (2.0, 2.5, 3.0, 0.6),   # beta = 3
    (1.0, 2.5, 1.7, 0.6),   # a = 1
])
def test_N2_closed_form_preconditions(args):
    with pytest.raises(PreconditionError):
        q_candidates_N2(*args)


def test_verify_report_anchor():
    report = verify_reduction(ANCHOR, ())
    assert report.passed
    assert report.collocation_points[:3] == (1.0, 2.0, 3.0)
    probe = report.collocation_points[-1]
    assert abs(probe - round(probe)) > 1e-3
    # N = 0: extracted polynomial is A_0 + A_1 n with both near zero
    assert abs(report.extracted_A[-1]) < 1e-12
    assert report.a_top_gap < 1e-12
    # the probe point is reproducible
    assert verify_reduction(ANCHOR, ()).collocation_points == report.collocation_points


def test_leading_coefficient_tracks_delta():
    # delta moved off N+2 while epsilon keeps the exponent sum closed:
    # the leading coefficient becomes 2+N-delta = -0.01 and the case fails
    p = HeunParams(a=2.0, q=4.0, alpha=3.0, beta=2.0, gamma=1.0,
                   delta=2.01, epsilon=2.99)
    report = verify_reduction(p, ())
    assert not report.passed
    assert report.extracted_A[-1] == pytest.approx(-0.01, abs=1e-9)
    assert report.a_top_gap < 1e-9


def test_leading_coefficient_closed_form_property():
    # A_top = 2+N-delta whenever the exponent-sum relation is closed,
    # independently of q and the e values
    rng = np.random.default_rng(42)
    for _ in range(50):
        n_case = int(rng.integers(0, 3))
        a, q, alpha, beta, gamma, delta = rng.uniform(-3.0, 3.0, size=6)
        epsilon = 1.0 + alpha + beta - gamma - delta
        p = HeunParams(a=a, q=q, alpha=alpha, beta=beta, gamma=gamma,
                       delta=delta, epsilon=epsilon)
        es = tuple(rng.uniform(0.2, 3.0, size=n_case))
        a_top = leading_difference(p, es, n_case + 1)
        scale = max(max(identity_scale(p, es, float(k))
                        for k in range(n_case + 2)), 1.0)
        assert abs(a_top - (2.0 + n_case - delta)) <= 1e-7 * scale


def test_degree_claim_defect_even_off_relation():
    # the degree-(N+2) coefficient vanishes identically, Fuchsian or not
    for p, es in [
        (ANCHOR, ()),
        (HeunParams(a=-1.3, q=0.7, alpha=2.2, beta=-0.4, gamma=1.9,
                    delta=0.3, epsilon=2.6), (0.8, 1.7)),
    ]:
        defect, scale = degree_claim_defect(p, es)
        assert defect <= 1e-8 * max(scale, 1.0)


def test_case_build_rejects_wrong_delta():
    p = HeunParams(a=2.0, q=4.0, alpha=3.0, beta=2.0, gamma=1.0,
                   delta=2.5, epsilon=2.5)
    with pytest.raises(PreconditionError, match="delta"):
        ReductionCase.build(p, ())


def test_case_build_rejects_failed_collocation():
    p = HeunParams(**{**ANCHOR.as_dict(), "q": 5.0})
    with pytest.raises(PreconditionError, match="verification"):
        ReductionCase.build(p, ())


def test_case_to_dict_shape():
    case = q_candidates_N1(*N1_DRAW)[0]
    d = case_to_dict(case)
    assert d["N"] == 1 and d["q"] == case.params.q
    assert d["e"] == list(case.e_list)
    assert d["report"]["passed"] is True
    assert len(d["report"]["points"]) == len(d["report"]["values"])


def test_general_solver_matches_N0_closed_form():
    case, = solve_reduction_general(2.0, 3.0, 2.0, 1.0, 0)
    assert case.params.q == pytest.approx(4.0, abs=1e-9)


def test_general_solver_matches_N1_closed_form():
    closed = q_candidates_N1(*N1_DRAW)
    general = solve_reduction_general(*N1_DRAW, 1)
    assert len(general) == len(closed)
    for c, g in zip(closed, general):
        assert g.params.q == pytest.approx(c.params.q, abs=1e-9)
        assert g.e_list == pytest.approx(c.e_list, abs=1e-9)


def test_general_solver_recovers_degenerate_N2_root():
    # the closed form skips the K = 1 root; collocation has no such blind spot
    with pytest.warns(DegenerateConstraintWarning):
        closed = q_candidates_N2(*N2_DRAW)
    general = solve_reduction_general(*N2_DRAW, 2)
    assert len(general) > len(closed)
    closed_qs = [c.params.q for c in closed]
    general_qs = [c.params.q for c in general]
    for q in closed_qs:
        assert min(abs(q - g) for g in general_qs) < 1e-9
    assert all(c.report.passed for c in general)


def test_general_solver_no_solution():
    with pytest.raises(NoSolutionError):
        solve_reduction_general(*N1_NO_ROOT, 1)


def test_general_solver_rejects_invalid_draw():
    # gamma+epsilon = alpha+beta-1-N lands on 0: forbidden for every q
    with pytest.raises(ValidationError):
        solve_reduction_general(2.0, 0.5, 1.5, 0.7, 1)
