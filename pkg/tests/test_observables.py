import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from factories import lp_joint_exists, rand_effect, rand_observable, rand_state
from effectalg import (
    BiObservable,
    ConeModel,
    Effect,
    InvariantError,
    Observable,
    State,
    Verdict,
    distribution,
    effects_coexist,
    evm,
    gbit,
    marginals,
    observables_coexist,
    orthant,
)
from effectalg.observables import binary_observable, is_joint, trivial_observable

M2 = orthant(2)
A = Observable(M2, [[0.5, 0.2], [0.5, 0.8]])


def test_evm():
    assert np.allclose(evm(A, []).vector, 0)
    assert np.allclose(evm(A, ["x1", "x2"]).vector, M2.unit)
    assert np.allclose(evm(A, ["x1"]).vector, [0.5, 0.2])
    with pytest.raises(KeyError):
        evm(A, ["nope"])


def test_distribution():
    assert np.allclose(distribution(A, State(M2, [1, 0])), [0.5, 0.5])
    assert distribution(trivial_observable(M2), State(M2, [0.3, 0.7])).tolist() == [1.0]
    g = gbit()
    X = Observable(g, [[0.5, 0.5, 0], [0.5, -0.5, 0]])
    assert np.allclose(distribution(X, State(g, [1, 0, 0])), [0.5, 0.5])


def test_observable_invariants():
    with pytest.raises(InvariantError):
        Observable(M2, [[0.5, 0.2], [0.4, 0.8]])
    with pytest.raises(InvariantError):
        Observable(M2, [[0.5, 0.2], [0.5, 0.8]], ["x", "x"])


def test_marginals_of_diagonal_and_column():
    B = Observable(M2, [[0.3, 0.9], [0.7, 0.1]])
    res = observables_coexist(A, B)
    m1, m2 = marginals(res.witness)
    assert m1.close_to(A, 1e-9) and m2.close_to(B, 1e-9)
    C = BiObservable(M2, [[[0.5, 0.2]], [[0.5, 0.8]]])
    m1, m2 = marginals(C)
    assert np.allclose(m2.vectors, [M2.unit])


def test_effect_coexistence_examples():
    a = Effect(M2, [0.3, 0.6])
    r = effects_coexist(a, Effect(M2, M2.unit - a.vector))
    assert r.coexist
    b = Effect(M2, [0.2, 0.3])
    r = effects_coexist(a, b)
    assert r.coexist
    W = r.witness
    assert np.allclose(evm(W, r.subset_a).vector, a.vector, atol=1e-7)
    assert np.allclose(evm(W, r.subset_b).vector, b.vector, atol=1e-7)
    g = gbit()
    r = effects_coexist(Effect(g, [0.5, 0.5, 0]), Effect(g, [0.5, 0, 0.5]))
    assert r.verdict is Verdict.INFEASIBLE
    assert r.observable_result.certificate_verified


def test_psd_scope():
    q = ConeModel.psd(2)
    p0 = Effect(q, q.to_coords(np.diag([1, 0])))
    plus = Effect(q, q.to_coords(np.full((2, 2), 0.5)))
    assert effects_coexist(p0, plus).verdict is Verdict.UNDECIDED
    assert effects_coexist(p0, p0).coexist
    # a noisy pair with a + b <= u is decided by the orthogonal construction
    r = effects_coexist(Effect(q, 0.5 * p0.vector), Effect(q, 0.5 * plus.vector))
    assert r.coexist
    Z, X = binary_observable(p0), binary_observable(plus)
    assert observables_coexist(Z, X).verdict is Verdict.UNDECIDED
    # a supplied joint for unsharp versions is verified
    Zs = Observable(q, [0.5 * Z.vectors[0] + 0.25 * q.unit, 0.5 * Z.vectors[1] + 0.25 * q.unit])
    Xs = Observable(q, [0.5 * X.vectors[0] + 0.25 * q.unit, 0.5 * X.vectors[1] + 0.25 * q.unit])
    cells = np.array([[q.unit / 4 + 0.25 * (Z.vectors[x] - q.unit / 2)
                       + 0.25 * (X.vectors[y] - q.unit / 2) for y in range(2)]
                      for x in range(2)])
    r = observables_coexist(Zs, Xs, candidate=cells)
    assert r.coexist and is_joint(r.witness, Zs, Xs)


@given(st.integers(0, 100_000), st.sampled_from([2, 3, 4]))
def test_classical_pairs_always_coexist(seed, n):
    rng = np.random.default_rng(seed)
    m = orthant(n)
    A, B = rand_observable(m, rng), rand_observable(m, rng)
    r = observables_coexist(A, B)
    assert r.coexist and is_joint(r.witness, A, B)
    assert r.certificate_verified


@given(st.integers(0, 100_000))
def test_gbit_pairs_agree_with_scipy(seed):
    rng = np.random.default_rng(seed)
    g = gbit()
    A, B = rand_observable(g, rng, 2), rand_observable(g, rng, 2)
    if rng.uniform() < 0.5:
        # unsharp X/Y pairs: infeasible when sharp enough
        A, B = _binary(g, rng, 1), _binary(g, rng, 2)
    r = observables_coexist(A, B)
    assert r.coexist == lp_joint_exists(A, B)
    assert r.certificate_verified
    if r.coexist:
        assert is_joint(r.witness, A, B)


def _binary(g, rng, axis):
    t = rng.uniform(0.6, 1.0)
    v = np.zeros(3)
    v[0] = 0.5
    v[axis] = 0.5 * t
    return Observable(g, [v, g.unit - v])


@given(st.integers(0, 100_000))
def test_coexisting_observables_give_coexisting_effect_pairs(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(3), gbit()][seed % 2]
    A, B = rand_observable(m, rng), rand_observable(m, rng)
    r = observables_coexist(A, B)
    if not r.coexist:
        return
    C = r.witness.flatten()
    for i, x in enumerate(A.outcomes):
        for j, y in enumerate(B.outcomes):
            ax = evm(C, [f"{x},{yy}" for yy in B.outcomes])
            by = evm(C, [f"{xx},{y}" for xx in A.outcomes])
            assert np.allclose(ax.vector, A.vectors[i], atol=1e-7)
            assert np.allclose(by.vector, B.vectors[j], atol=1e-7)


@given(st.integers(0, 100_000))
def test_distributions_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    for m in (orthant(3), gbit(), ConeModel.psd(2)):
        A = rand_observable(m, rng)
        assert abs(distribution(A, rand_state(m, rng)).sum() - 1) <= 1e-9
