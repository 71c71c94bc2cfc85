import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import distance_to_segment
from pareto_tracer.continuation import ExploreConfig, corrector, explore, predictor
from pareto_tracer.core import CountingProblem, MethodTag, MooProblem
from pareto_tracer.hvp import HvpMode, PredictorWeights
from pareto_tracer.krylov import Solver, SolverConfig
from pareto_tracer.metrics import dominates, generational_distance
from pareto_tracer.mgd import MgdConfig, mgd_run
from pareto_tracer.problems import FonsecaFleming, QuadraticBiObjective, analytic_front


def unit_quadratic(n=4):
    return QuadraticBiObjective(np.zeros(n), np.eye(n)[0])


class LinearPair(MooProblem):
    """Zero curvature, so CG breaks down on the exact operator."""

    name = "linear"
    has_hvp = True

    @property
    def n_dim(self):
        return 2

    @property
    def n_obj(self):
        return 2

    def evaluate(self, x):
        return np.array([x[0] + 0.1 * x[1], -x[0] + 0.1 * x[1]])

    def gradients(self, x):
        return np.array([[1.0, 0.1], [-1.0, 0.1]])

    def hvp(self, x, alpha, v):
        return np.zeros(2)


MID = np.array([0.5, 0.0, 0.0, 0.0])
HALF = np.array([0.5, 0.5])


def test_predictor_identity_hessian_one_iteration():
    p = unit_quadratic()
    v, report = predictor(p, MID, PredictorWeights(HALF, np.array([1.0, -1.0])), HvpMode.EXACT, Solver.CG)
    assert np.allclose(v, [1.0, 0.0, 0.0, 0.0])
    assert report.iterations_used == 1


def test_predictor_reverse_direction():
    p = unit_quadratic()
    v, _ = predictor(p, MID, PredictorWeights(HALF, np.array([-1.0, 1.0])), HvpMode.EXACT, Solver.CG)
    assert np.allclose(v, [-1.0, 0.0, 0.0, 0.0])


@pytest.mark.parametrize("solver", list(Solver))
def test_predictor_gn_sum_is_parallel_to_axis(solver):
    p = unit_quadratic()
    v, _ = predictor(p, MID, PredictorWeights(HALF, np.array([1.0, -1.0])), HvpMode.GN_SUM, solver,
                     SolverConfig(tol=1e-12), damping=1e-6)
    assert v[0] > 0
    assert np.allclose(v[1:], 0.0)
    # (0.25 e1 e1^T + 1e-6 I) v = e1
    assert v[0] == pytest.approx(1 / (0.25 + 1e-6))


def test_predictor_exact_falls_back_to_finite_differences():
    class NoHvp(QuadraticBiObjective):
        has_hvp = False

        def hvp(self, x, alpha, v):
            raise NotImplementedError

    base = unit_quadratic()
    p = CountingProblem(NoHvp(base.c1, base.c2))
    v, report = predictor(p, MID, PredictorWeights(HALF, np.array([1.0, -1.0])), HvpMode.EXACT, Solver.CG,
                          grads=base.gradients(MID))
    assert np.allclose(v, [1.0, 0, 0, 0], atol=1e-6)
    assert p.gradient_evals == 2 * report.matvec_count


def test_corrector_examples():
    p = unit_quadratic()
    x = np.array([0.3, 0.0, 0.0, 0.0])
    assert np.allclose(corrector(p, x, 5, 0.01), x, atol=1e-8)
    off = x + 0.05 * np.array([0.0, 1.0, 0.0, 0.0])
    once = corrector(p, off, 1, 0.01)
    assert distance_to_segment(once, p.c1, p.c2) < distance_to_segment(off, p.c1, p.c2)
    same = corrector(p, off, 0, 0.01)
    assert same.tobytes() == off.tobytes()
    with pytest.raises(ValueError):
        corrector(p, off, -1, 0.01)


def test_config_validation():
    with pytest.raises(ValueError):
        ExploreConfig(n_points=0)
    with pytest.raises(ValueError):
        ExploreConfig(children_per_parent=0)
    with pytest.raises(ValueError):
        ExploreConfig(predictor_step=0.0)
    with pytest.raises(ValueError):
        ExploreConfig(beta_directions=((0.0, 0.0),))
    with pytest.raises(ValueError):
        ExploreConfig(beta_directions=((2.0, 0.0),))
    cfg = ExploreConfig(solver="minres", hvp_mode="fd")
    assert cfg.solver is Solver.MINRES and cfg.hvp_mode is HvpMode.FD_EXACT


def test_beta_length_must_match_objectives():
    with pytest.raises(ValueError):
        explore(unit_quadratic(), MID, ExploreConfig(n_points=1, beta_directions=((1.0, -1.0, 0.0),)))


def test_single_child_per_direction():
    res = explore(unit_quadratic(), MID, ExploreConfig(n_points=1, children_per_parent=1))
    assert len(res.raw_points) == 3
    assert len(res.archive) <= 3
    assert [p.parent_id for p in res.raw_points] == [None, 0, 0]


def _warm(problem, seed=0):
    x0 = problem.initial_point(np.random.default_rng(seed))
    return mgd_run(problem, x0, MgdConfig()).x


@pytest.fixture(scope="module")
def quad_run():
    p = QuadraticBiObjective.default()
    # descend to stationarity so the root itself sits on the segment
    x0 = mgd_run(p, p.initial_point(np.random.default_rng(0)), MgdConfig(0.1, 5000, 1e-9)).x
    return p, explore(p, x0, ExploreConfig())


def _segment_param(p, x):
    seg = p.c2 - p.c1
    return float((x - p.c1) @ seg / (seg @ seg))


def test_quadratic_archive_near_segment_and_spans_front(quad_run):
    p, res = quad_run
    inside = [pt for pt in res.archive if 0.0 <= _segment_param(p, pt.x) <= 1.0]
    beyond = [pt for pt in res.archive if not 0.0 <= _segment_param(p, pt.x) <= 1.0]
    assert max(p.distance_to_pareto_set(pt.x) for pt in inside) <= 1e-3
    # an overshoot past an endpoint can survive filtering; it stays within one predictor step
    assert len(beyond) <= 2
    assert all(p.distance_to_pareto_set(pt.x) <= 0.1 for pt in beyond)
    f1 = res.archive.objectives()[:, 0]
    front = analytic_front(p, 100)
    assert (f1.max() - f1.min()) >= 0.9 * (front[:, 0].max() - front[:, 0].min())


def test_budget_lineage_and_non_domination(quad_run):
    _, res = quad_run
    assert len(res.raw_points) == 1 + 2 * 100
    ids = {pt.point_id for pt in res.raw_points}
    assert all(pt.parent_id in ids for pt in res.raw_points[1:])
    assert {pt.point_id for pt in res.archive} <= ids
    pts = res.archive.objectives()
    assert not any(dominates(a, b) for a in pts for b in pts)
    assert all(pt.method_tag is MethodTag.PC_CORRECTED for pt in res.raw_points)
    assert res.cost.points_generated == 201
    assert len(res.solves) == 200


def test_breadth_first_order_with_two_children():
    res = explore(unit_quadratic(), MID, ExploreConfig(n_points=6, children_per_parent=2,
                                                      beta_directions=((1.0, -1.0),)))
    # root -> 1, 2; 1 -> 3, 4; 2 -> 5, 6
    assert [p.parent_id for p in res.raw_points[1:]] == [0, 0, 1, 1, 2, 2]


def test_determinism():
    p = FonsecaFleming(3)
    x0 = _warm(p)
    a = explore(p, x0, ExploreConfig(n_points=20, random_beta=True, children_per_parent=2, seed=3))
    b = explore(p, x0, ExploreConfig(n_points=20, random_beta=True, children_per_parent=2, seed=3))
    assert a.archive.objectives().tobytes() == b.archive.objectives().tobytes()
    c = explore(p, x0, ExploreConfig(n_points=20, random_beta=True, children_per_parent=2, seed=4))
    assert c.archive.objectives().tobytes() != a.archive.objectives().tobytes()


@settings(max_examples=20)
@given(mode=st.sampled_from(list(HvpMode)), solver=st.sampled_from(list(Solver)),
       steps=st.integers(0, 3), n_points=st.integers(1, 8))
def test_gradient_cost_accounting(mode, solver, steps, n_points):
    p = FonsecaFleming(3)
    x0 = _warm(p)
    cfg = ExploreConfig(n_points=n_points, corrector_steps=steps, hvp_mode=mode, solver=solver)
    res = explore(p, x0, cfg)
    children = 2 * n_points
    expected = children * (1 + steps)
    if mode is HvpMode.FD_EXACT:
        expected += 2 * sum(log.report.matvec_count for log in res.solves)
        assert all(log.report.matvec_count <= log.report.iterations_used + 1 for log in res.solves)
    assert res.cost.gradient_evals == expected
    assert res.raw_points[-1].grad_evals_cum == expected


def test_breakdown_falls_back_to_rhs_direction():
    p = LinearPair()
    res = explore(p, np.zeros(2), ExploreConfig(n_points=3, hvp_mode="exact", solver="cg", corrector_steps=0))
    assert res.cost.predictor_fallbacks == 6
    assert all(log.fallback for log in res.solves)
    step = res.raw_points[1].x - res.raw_points[0].x
    rhs = np.array([2.0, 0.0])  # g1 - g2
    assert np.allclose(step, 0.1 * rhs / np.linalg.norm(rhs))
    assert res.raw_points[1].method_tag is MethodTag.PC_PREDICTED


def test_corrector_improves_generational_distance():
    p = QuadraticBiObjective.default()
    x0 = _warm(p)
    truth = analytic_front(p, 200_000)
    gd = {}
    for steps in (0, 1):
        res = explore(p, x0, ExploreConfig(corrector_steps=steps))
        gd[steps] = generational_distance(res.archive.objectives(), truth)
    assert gd[1] <= gd[0]


def test_unnormalised_direction_option():
    p = unit_quadratic()
    res = explore(p, MID, ExploreConfig(n_points=1, normalize_direction=False, corrector_steps=0,
                                        hvp_mode="exact", solver="cg", beta_directions=((0.5, -0.5),)))
    assert np.allclose(res.raw_points[1].x - MID, 0.1 * np.array([0.5, 0, 0, 0]))
