import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_spd
from pareto_tracer.krylov import (
    KrylovBreakdown,
    LinearOperator,
    Solver,
    SolverConfig,
    cg_solve,
    cr_solve,
    dense_solve_oracle,
    minres_solve,
    solve,
)

SOLVERS = {"cg": cg_solve, "cr": cr_solve, "minres": minres_solve}
TIGHT = SolverConfig(tol=1e-10, max_iter=50)


def op(matrix):
    return LinearOperator.from_matrix(np.asarray(matrix, dtype=float))


@pytest.mark.parametrize("name", SOLVERS)
def test_identity_solved_in_one_iteration(name):
    v, report = SOLVERS[name](op(np.eye(3)), np.array([1.0, 2.0, 3.0]), TIGHT)
    assert np.allclose(v, [1, 2, 3])
    assert report.iterations_used == 1
    assert report.converged


@pytest.mark.parametrize("name", SOLVERS)
def test_diagonal_inversion(name):
    v, report = SOLVERS[name](op(np.diag([1.0, 2.0, 4.0])), np.array([1.0, 2.0, 4.0]), TIGHT)
    assert np.allclose(v, 1.0, atol=1e-10)
    assert report.iterations_used <= 3
    assert report.final_residual_norm <= 1e-10


@pytest.mark.parametrize("name", SOLVERS)
def test_two_by_two_matches_direct_solve(name):
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    v, report = SOLVERS[name](op(a), np.array([3.0, 3.0]), TIGHT)
    assert np.allclose(v, dense_solve_oracle(a, [3.0, 3.0]), atol=1e-8)
    assert np.allclose(v, [1.0, 1.0], atol=1e-8)
    hist = report.residual_history
    assert all(b <= a_ + 1e-12 for a_, b in zip(hist, hist[1:]))


def test_minres_handles_indefinite_system():
    v, report = minres_solve(op(np.diag([1.0, -1.0])), np.array([2.0, 3.0]), TIGHT)
    assert np.allclose(v, [2.0, -3.0], atol=1e-10)
    assert report.iterations_used <= 2


def test_minres_identity_single_component():
    v, report = minres_solve(op(np.eye(2)), np.array([5.0, 0.0]), TIGHT)
    assert np.allclose(v, [5.0, 0.0])
    assert report.iterations_used == 1


@pytest.mark.parametrize("name", SOLVERS)
def test_zero_rhs_gives_zero_without_iterations(name):
    v, report = SOLVERS[name](op(random_spd(np.random.default_rng(0), 4)), np.zeros(4), TIGHT)
    assert not np.any(v)
    assert report.iterations_used == 0
    assert report.matvec_count == 0
    assert report.converged


def test_cg_breakdown_carries_partial_solution():
    # p^T H p = 0 on the first direction
    with pytest.raises(KrylovBreakdown) as info:
        cg_solve(op(np.diag([1.0, -1.0])), np.array([1.0, 1.0]), TIGHT)
    assert info.value.solution.shape == (2,)
    assert info.value.report.iterations_used == 0


def test_cr_breakdown_on_zero_operator():
    with pytest.raises(KrylovBreakdown) as info:
        cr_solve(op(np.zeros((2, 2))), np.array([1.0, 0.0]), TIGHT)
    assert not info.value.report.converged


def test_minres_breakdown_on_singular_inconsistent_system():
    with pytest.raises(KrylovBreakdown):
        minres_solve(op(np.diag([1.0, 0.0])), np.array([1.0, 1.0]), TIGHT)


def test_budget_exhaustion_reports_not_converged():
    a = random_spd(np.random.default_rng(1), 30, shift=0.01)
    b = np.ones(30)
    for fn in SOLVERS.values():
        _, report = fn(op(a), b, SolverConfig(tol=1e-14, max_iter=3))
        assert report.iterations_used == 3
        assert not report.converged
        assert report.converged == (report.final_residual_norm <= 1e-14)


def test_record_residuals_off():
    _, report = cg_solve(op(np.eye(2)), np.ones(2), SolverConfig(record_residuals=False))
    assert report.residual_history is None


def test_non_finite_operator_output_raises():
    bad = LinearOperator(2, lambda v: np.array([np.nan, 0.0]))
    with pytest.raises(FloatingPointError):
        cg_solve(bad, np.ones(2))


def test_rhs_shape_checked():
    with pytest.raises(ValueError):
        cg_solve(op(np.eye(3)), np.ones(2))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)


def test_dispatcher_and_labels():
    a = np.array([[4.0, 1.0], [1.0, 3.0]])
    for label in ("cg", "cr", "minres"):
        v, _ = solve(op(a), np.array([1.0, 2.0]), label, TIGHT)
        assert np.allclose(a @ v, [1.0, 2.0], atol=1e-9)
    assert Solver("cr") is Solver.CR


def test_dense_oracle_examples(rng):
    assert np.allclose(dense_solve_oracle(np.eye(3), [1, 2, 3]), [1, 2, 3])
    assert np.allclose(dense_solve_oracle(np.diag([2.0, 5.0]), [2, 5]), [1, 1])
    a = random_spd(rng, 40)
    b = rng.standard_normal(40)
    x = dense_solve_oracle(a, b)
    assert np.linalg.norm(b - a @ x) <= 1e-9 * np.linalg.norm(b)
    with pytest.raises(np.linalg.LinAlgError):
        dense_solve_oracle(np.zeros((2, 2)), [1, 1])
    with pytest.raises(ValueError):
        dense_solve_oracle(np.eye(501), np.ones(501))


def test_to_matrix_round_trip(rng):
    a = rng.standard_normal((5, 5))
    assert np.allclose(op(a).to_matrix(), a)
    assert np.allclose(op(a) @ np.ones(5), a.sum(axis=1))


spd_seeds = st.integers(0, 2**31 - 1)


@given(seed=spd_seeds, n=st.integers(2, 40))
def test_cg_finite_termination(seed, n):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n)
    b = rng.standard_normal(n)
    v, report = cg_solve(op(a), b, SolverConfig(tol=1e-10, max_iter=n + 5))
    assert report.converged
    assert np.linalg.norm(a @ v - b) <= 1e-7 * max(1.0, np.linalg.norm(b))


@given(seed=spd_seeds, n=st.integers(2, 40), name=st.sampled_from(["cr", "minres"]))
def test_residual_histories_non_increasing(seed, n, name):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n)
    _, report = SOLVERS[name](op(a), rng.standard_normal(n), SolverConfig(tol=1e-12, max_iter=2 * n))
    hist = np.array(report.residual_history)
    assert np.all(np.diff(hist) <= 1e-12)


@given(seed=spd_seeds, n=st.integers(1, 30), name=st.sampled_from(list(SOLVERS)))
def test_matvec_count_bounded_by_iterations(seed, n, name):
    rng = np.random.default_rng(seed)
    calls = []
    a = random_spd(rng, n)
    counted = LinearOperator(n, lambda v: calls.append(1) or a @ v)
    _, report = SOLVERS[name](counted, rng.standard_normal(n), SolverConfig(tol=1e-9, max_iter=n + 5))
    assert report.matvec_count == len(calls)
    assert report.matvec_count <= report.iterations_used + 1


@given(seed=spd_seeds, n=st.integers(2, 25))
def test_solvers_agree_with_dense_oracle(seed, n):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n)
    b = rng.standard_normal(n)
    ref = dense_solve_oracle(a, b)
    for fn in SOLVERS.values():
        v, _ = fn(op(a), b, SolverConfig(tol=1e-12, max_iter=3 * n))
        assert np.linalg.norm(v - ref) <= 1e-7 * np.linalg.norm(ref)


@given(seed=spd_seeds, n=st.integers(2, 20))
def test_operator_linear_and_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n)
    o = op(a)
    u, w = rng.standard_normal(n), rng.standard_normal(n)
    s, t = rng.standard_normal(2)
    assert np.allclose(o.apply(s * u + t * w), s * o.apply(u) + t * o.apply(w), atol=1e-10 * np.abs(a).sum())
    assert abs(o.apply(u) @ w - u @ o.apply(w)) <= 1e-8 * np.abs(a).sum()


@given(seed=spd_seeds, n=st.integers(3, 20))
def test_minres_on_indefinite_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eig = rng.uniform(0.5, 3.0, n) * rng.choice([-1.0, 1.0], n)
    a = (q * eig) @ q.T
    b = rng.standard_normal(n)
    v, report = minres_solve(op(a), b, SolverConfig(tol=1e-11, max_iter=4 * n))
    assert report.converged
    assert np.allclose(v, dense_solve_oracle(a, b), atol=1e-8)
