import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bruteforce import grid_min, product_curve_min
from fwunbounded import certify, suite
from fwunbounded import objectives as ob
from fwunbounded.objectives import ObjectiveModel
from fwunbounded.oracles import FeasibleSet, SetKind
from fwunbounded.solver import IterateRecord, SolveTrace, Termination, solve
from fwunbounded.suite import paper_suite, run_problem

HALFSPACE = FeasibleSet(SetKind.HALFSPACE_SIMPLEX, 2)
DEMO = ob.quadratic([1.0, 1.0], np.eye(2))


def demo_trace():
    return solve(DEMO, HALFSPACE, [1.0, 0.0])


def synthetic(dists, grads, fvals=None, gaps=None):
    n = len(dists)
    fvals = fvals or [0.0] * n
    gaps = gaps or [-1.0] * n
    z = np.zeros(2)
    recs = [IterateRecord(k, z, z, g, 0.5, f, gn, d)
            for k, (d, gn, f, g) in enumerate(zip(dists, grads, fvals, gaps))]
    return SolveTrace(recs, Termination.GAP_BELOW_TOLERANCE)


def affine(a):
    a = np.asarray(a, dtype=float)
    return ObjectiveModel("affine", lambda x: float(a @ x), lambda x: a.copy(), 0.0)


# -- condition (A) -------------------------------------------------------------

def test_condition_A_sqrt_quadratic():
    rep = certify.check_condition_A(ob.sqrt_quadratic([1.0, 2.0], 1.0), HALFSPACE, 1000, seed=3)
    assert rep.passed and rep.statistic <= 1.0


def test_condition_A_halved_L_fails():
    rep = certify.check_condition_A(DEMO, HALFSPACE, 200, lipschitz=DEMO.lipschitz_L / 2)
    assert not rep.passed
    assert rep.statistic == pytest.approx(2.0)


def test_condition_A_linear_objective():
    f = ob.quadratic([1.0, 2.0], np.zeros((2, 2)))
    rep = certify.check_condition_A(f, HALFSPACE, 100)
    assert rep.passed and rep.statistic == 0.0
    with pytest.raises(ValueError):
        certify.check_condition_A(f, HALFSPACE, 1)


# -- condition (B) -------------------------------------------------------------

def test_condition_B_quadratic_and_lse():
    rep = certify.check_condition_B(DEMO, HALFSPACE, 500)
    assert rep.passed and rep.statistic >= 1.0
    assert certify.check_condition_B(ob.log_sum_exp(2), HALFSPACE, 500).passed


def test_condition_B_counterexample():
    rep = certify.check_condition_B(affine([1.0, -1.0]), HALFSPACE, 50)
    assert not rep.passed and rep.statistic == pytest.approx(-1.0)


def test_condition_B_scale_invariant_generators():
    fs = FeasibleSet(SetKind.MONOTONE_CONE, 3)
    f = ob.sqrt_quadratic([1.0, 0.5, 2.0], 1.0)
    base = certify.check_condition_B(f, fs, 100, seed=1)

    class Scaled(FeasibleSet):
        def recession_generators(self):
            return [7.5 * g for g in super().recession_generators()]

    scaled = certify.check_condition_B(f, Scaled(SetKind.MONOTONE_CONE, 3), 100, seed=1)
    assert scaled.statistic == pytest.approx(base.statistic, rel=1e-14)


# -- rate constants and verification ------------------------------------------

def test_rate_constants_examples():
    cert = certify.rate_constants(synthetic([1.0, 2.0], [1.0, 3.0]), L=2.0)
    assert (cert.sigma, cert.gamma) == (2.0, 3.0)
    assert cert.Gamma == pytest.approx(1 / 16)
    cert = certify.rate_constants(synthetic([1.0], [1.0]), L=0.5)
    assert cert.Gamma == pytest.approx(0.5)


def test_rate_constants_demo():
    cert = certify.rate_constants(demo_trace(), DEMO.lipschitz_L)
    assert cert.sigma == pytest.approx(np.sqrt(2))
    assert cert.gamma == pytest.approx(np.sqrt(10))
    assert cert.Gamma == pytest.approx(min(1 / (2 * np.sqrt(20)), 1 / 8))


def test_rate_constants_need_a_moving_step():
    with pytest.raises(ValueError):
        certify.rate_constants(SolveTrace(), 1.0)
    with pytest.raises(ValueError):
        certify.rate_constants(synthetic([1.0], [1.0], gaps=[0.0]), 1.0)


def test_verify_rate_closed_form_sequence():
    # a_k = a0 / (1 + G a0 k) meets the bound with equality, but
    # a_k - a_{k+1} = G a_k a_{k+1} < G a_k^2, so the recurrence itself fails
    G, a0 = 0.25, 2.0
    a = [a0 / (1 + G * a0 * k) for k in range(30)]
    cert = certify.RateCertificate(1.0, 1.0, G, 1.0)
    out = certify.verify_rate(synthetic([1.0] * 30, [1.0] * 30, fvals=a), 0.0, cert)
    assert out.bound_ok and not out.recurrence_ok


def test_verify_rate_recurrence_with_equality():
    G = 0.25
    a = [2.0]
    for _ in range(29):
        a.append(a[-1] - G * a[-1] ** 2)
    cert = certify.RateCertificate(1.0, 1.0, G, 1.0)
    out = certify.verify_rate(synthetic([1.0] * 30, [1.0] * 30, fvals=a), 0.0, cert)
    assert out.recurrence_ok and out.bound_ok


def test_verify_rate_constant_sequence_fails():
    cert = certify.RateCertificate(1.0, 1.0, 1.0, 1.0)
    out = certify.verify_rate(synthetic([1.0] * 3, [1.0] * 3, fvals=[1.0, 1.0, 1.0]), 0.0, cert)
    assert not out.recurrence_ok


def test_verify_rate_demo():
    trace = demo_trace()
    out = certify.verify_rate(trace, 1.5, certify.rate_constants(trace, DEMO.lipschitz_L))
    assert out.recurrence_ok and out.bound_ok and not out.conditional


def test_verify_rate_rejects_inconsistent_reference():
    trace = demo_trace()
    with pytest.raises(ValueError):
        certify.verify_rate(trace, 1.6, certify.rate_constants(trace, DEMO.lipschitz_L))


def test_strong_distance_examples():
    trace = demo_trace()
    cert = certify.rate_constants(trace, DEMO.lipschitz_L)
    assert certify.verify_strong_distance(trace, [0.5, 0.5], 2.0, 1.5, cert)
    assert not certify.verify_strong_distance(trace, [0.0, 0.0], 2.0, 1.5, cert)
    at_opt = solve(DEMO, HALFSPACE, [0.5, 0.5])
    assert certify.verify_strong_distance(at_opt, [0.5, 0.5], 2.0, 1.5, cert)
    with pytest.raises(ValueError):
        certify.verify_strong_distance(trace, [0.5, 0.5], 0.0, 1.5, cert)


# -- reference solutions -------------------------------------------------------

def test_reference_demo_all_modes_agree():
    for mode in ["analytic", "grid", "nlp", "long-run-FW"]:
        ref = certify.reference_solution(DEMO, HALFSPACE, mode)
        assert ref.f_star == pytest.approx(1.5, abs=1e-6), mode
    assert certify.reference_solution(DEMO, HALFSPACE, "analytic").method == "analytic"


def test_reference_linear_on_halfspace_is_min_coefficient():
    f = ob.quadratic([3.0, 1.5, 2.0], np.zeros((3, 3)))
    ref = certify.reference_solution(f, FeasibleSet(SetKind.HALFSPACE_SIMPLEX, 3))
    assert ref.f_star == pytest.approx(1.5)


def test_reference_cone_apex():
    fs = FeasibleSet(SetKind.MONOTONE_CONE, 3)
    for f in [ob.sqrt_quadratic([1.0, 2.0, 3.0], 1.0), ob.log_sum_exp(3)]:
        ref = certify.reference_solution(f, fs)
        np.testing.assert_array_equal(ref.x_star, np.zeros(3))
        assert ref.f_star == f.evaluate(np.zeros(3))


def test_reference_errors():
    with pytest.raises(ValueError):
        certify.reference_solution(ob.log_sum_exp(4), FeasibleSet(SetKind.ORTHANT, 4), "grid")
    with pytest.raises(ValueError):
        certify.reference_solution(ob.log_sum_exp(2), HALFSPACE, "analytic")
    with pytest.raises(ValueError):
        certify.reference_solution(DEMO, HALFSPACE, "magic")


@pytest.mark.parametrize("prob", [p for p in paper_suite()
                                  if p.feasible_set.kind not in (SetKind.MONOTONE_CONE, SetKind.ORTHANT)],
                         ids=lambda p: p.name)
def test_bench_references_against_plain_grid(prob):
    """Every f* used by the bench lies below a plain grid and matches a zooming grid."""
    ref = suite.best_reference(prob.objective, prob.feasible_set)
    f, fs = prob.objective, prob.feasible_set
    best, _ = grid_min(f.evaluate, lambda x: fs.contains(x, tol=0.0), box=(0.0, 3.0), points=151)
    assert ref.f_star <= best + 1e-12
    assert ref.f_star == pytest.approx(best, abs=5e-2)
    if fs.kind is SetKind.PRODUCT_SET:
        curve = product_curve_min(f.evaluate)
        assert ref.f_star == pytest.approx(curve, abs=1e-9)
    else:
        zoom = certify.reference_solution(f, fs, "grid", resolution=1e-7)
        assert ref.f_star <= zoom.f_star + 1e-12
        assert ref.f_star == pytest.approx(zoom.f_star, abs=1e-5)
    assert fs.contains(ref.x_star)


def test_nlp_matches_symmetric_closed_forms():
    lse = ob.log_sum_exp(3)
    ref = certify.reference_solution(lse, FeasibleSet(SetKind.HALFSPACE_SIMPLEX, 3), "nlp")
    assert ref.f_star == pytest.approx(np.log(3) + 1 / 3, abs=1e-12)
    ref = certify.reference_solution(lse, FeasibleSet(SetKind.PRODUCT_SET, 3), "nlp")
    assert ref.f_star == pytest.approx(1 + np.log(3), abs=1e-12)


def test_nlp_reference_is_stationary_on_polyhedral_sets():
    f = ob.regularized_norm([1.0, 2.0], alpha=1.0, beta=0.1)
    for fs in [HALFSPACE, FeasibleSet(SetKind.POLYHEDRON, 2, [[1.0, 1.0], [1.0, 2.0]], [1.0, 2.0])]:
        ref = certify.reference_solution(f, fs, "nlp")
        assert certify.stationarity_residual(f, fs, ref.x_star) <= 1e-12


# -- stationarity residual -----------------------------------------------------

def test_stationarity_residual_examples():
    assert certify.stationarity_residual(DEMO, HALFSPACE, [0.5, 0.5]) == 0.0
    assert certify.stationarity_residual(DEMO, HALFSPACE, [1.0, 0.0]) == pytest.approx(2.0)
    zero_grad = ObjectiveModel("flat", lambda x: 0.0, lambda x: np.zeros(2), 0.0)
    assert certify.stationarity_residual(zero_grad, HALFSPACE, [3.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        certify.stationarity_residual(affine([1.0, -1.0]), HALFSPACE, [1.0, 0.0])


# -- invariants over the suite ---------------------------------------------------

@pytest.mark.parametrize("prob", paper_suite(), ids=lambda p: p.name)
def test_bench_certificates(prob):
    res = run_problem(prob)
    a = res.trace.f_values - res.reference.f_star
    assert np.all(a[1:] <= a[:-1] + 1e-12)
    assert res.rate_ok and res.decrease_ok
    if res.trace.termination is Termination.GAP_BELOW_TOLERANCE:
        residual = certify.stationarity_residual(prob.objective, prob.feasible_set, res.trace.final.x)
        assert residual <= 1e-8


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_sampled_points_are_in_the_box_and_set(seed):
    rng = np.random.default_rng(seed)
    for fs in [HALFSPACE, FeasibleSet(SetKind.PRODUCT_SET, 3), FeasibleSet(SetKind.MONOTONE_CONE, 4)]:
        X = certify.sample_feasible(fs, rng, 20)
        assert X.shape == (20, fs.n)
        assert all(fs.contains(x) for x in X)
        assert np.all((X >= 0) & (X <= certify.TEST_BOX))
