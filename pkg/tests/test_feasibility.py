import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from effectalg import ConeBlock, DimensionError, LPProblem, gbit
from effectalg.feasibility import FeasibilityResult, solve_feasibility, verify_certificate
from effectalg.observables import Observable, joint_lp


def test_scalar_feasible_and_infeasible():
    blk = ConeBlock.orthant(1)
    p = LPProblem([[1.0]], [1.0], [blk])
    r = solve_feasibility(p)
    assert r.feasible and np.allclose(r.point, [1.0])
    assert verify_certificate(p, r)
    p = LPProblem([[1.0]], [-1.0], [blk])
    r = solve_feasibility(p)
    assert not r.feasible
    assert r.certificate.tolist() == [1.0]
    assert verify_certificate(p, r)


def test_gbit_xy_infeasible_with_exact_certificate():
    g = gbit()
    X = Observable(g, [[0.5, 0.5, 0], [0.5, -0.5, 0]])
    Y = Observable(g, [[0.5, 0, 0.5], [0.5, 0, -0.5]])
    p = joint_lp(X, Y)
    r = solve_feasibility(p)
    assert not r.feasible
    assert verify_certificate(p, r)
    # frozen certificate from this solver (Bland's rule is deterministic)
    assert r.certificate.tolist() == [1, -0.5, 0, 1, 0.5, 0, -0.5, 0, -0.5,
                                      -0.5, 0, 0.5]


def test_corrupted_results_rejected():
    blk = ConeBlock.orthant(1)
    p = LPProblem([[1.0]], [1.0], [blk])
    assert not verify_certificate(p, FeasibilityResult(True, point=np.array([0.5])))
    assert not verify_certificate(p, FeasibilityResult(True, point=np.array([-1.0])))
    assert not verify_certificate(p, FeasibilityResult(False, certificate=np.array([1.0])))
    p = LPProblem([[1.0]], [-1.0], [blk])
    assert not verify_certificate(p, FeasibilityResult(False, certificate=np.array([-1.0])))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        LPProblem(np.ones((2, 2)), [1.0], [ConeBlock.orthant(2)])
    with pytest.raises(DimensionError):
        LPProblem(np.ones((1, 3)), [1.0], [ConeBlock.orthant(2)])


def test_determinism():
    g = gbit()
    X = Observable(g, [[0.5, 0.25, 0], [0.5, -0.25, 0]])
    Y = Observable(g, [[0.5, 0, 0.25], [0.5, 0, -0.25]])
    p = joint_lp(X, Y)
    r1, r2 = solve_feasibility(p), solve_feasibility(p)
    assert r1.feasible and r2.feasible
    assert r1.point.tobytes() == r2.point.tobytes()
    assert r1.iterations == r2.iterations


@given(st.integers(0, 10_000))
def test_agrees_with_scipy_on_random_orthant_systems(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 4)), int(rng.integers(1, 5))
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    b = rng.integers(-3, 4, size=m).astype(float)
    p = LPProblem(A, b, [ConeBlock.orthant(n)])
    r = solve_feasibility(p)
    ref = linprog(np.zeros(n), A_eq=A, b_eq=b, bounds=[(0, None)] * n,
                  method="highs")
    assert r.feasible == (ref.status == 0)
    assert verify_certificate(p, r)


@given(st.integers(0, 10_000))
def test_gbit_block_systems_round_trip(seed):
    rng = np.random.default_rng(seed)
    g = gbit()
    blk = ConeBlock.from_model(g)
    A = rng.integers(-2, 3, size=(2, 3)).astype(float)
    b = rng.integers(-2, 3, size=2).astype(float)
    p = LPProblem(A, b, [blk])
    r = solve_feasibility(p)
    ref = linprog(np.zeros(3), A_ub=-g.facets, b_ub=np.zeros(4), A_eq=A,
                  b_eq=b, bounds=[(None, None)] * 3, method="highs")
    assert r.feasible == (ref.status == 0)
    assert verify_certificate(p, r)
