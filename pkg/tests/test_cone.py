import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from effectalg import (
    ConeModel,
    Effect,
    InvariantError,
    ModelMismatchError,
    UndefinedSumError,
    complement,
    effect_add,
    effect_perp,
    effect_scale,
    gbit,
    leq,
    orthant,
    theta,
    unit_effect,
)
from effectalg.cone import extreme_rays, hermitian_basis


def test_gbit_membership_examples():
    g = gbit()
    assert g.contains([0.5, 0.5, 0]) and g.contains(g.unit - [0.5, 0.5, 0])
    Effect(g, [0.5, 0.5, 0])
    with pytest.raises(InvariantError):
        Effect(g, [0.5, 0.6, 0])


def test_orthant_interval():
    m = orthant(2)
    Effect(m, [1, 0.3])
    with pytest.raises(InvariantError):
        Effect(m, [1.2, 0])
    with pytest.raises(InvariantError):
        Effect(m, [-0.1, 0])


def test_psd_membership():
    q = ConeModel.psd(2)
    assert not q.contains(q.to_coords(np.diag([1, -0.01])))
    assert q.contains(q.to_coords(np.full((2, 2), 0.5)))


def test_hermitian_basis_is_orthonormal():
    for n in (2, 3):
        B = hermitian_basis(n)
        gram = np.real(np.einsum("aij,bji->ab", B, B))
        assert np.allclose(gram, np.eye(n * n), atol=1e-14)
        for b in B:
            assert np.allclose(b, b.conj().T)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_psd_coordinate_round_trip(x):
    q = ConeModel.psd(2)
    assert np.allclose(q.to_coords(q.to_matrix(x)), x, atol=1e-12)


def test_gbit_facets_recomputed_from_generators():
    g = gbit()
    F = extreme_rays(g.generators)
    F = F / np.abs(F).max(axis=1, keepdims=True)
    key = sorted(map(tuple, np.round(F, 9)))
    assert key == sorted(map(tuple, g.facets.astype(float)))


def test_invalid_models_rejected():
    with pytest.raises(InvariantError):
        ConeModel.polyhedral(np.eye(2), np.eye(2), [1, 0])  # unit on boundary
    with pytest.raises(InvariantError):
        ConeModel.polyhedral([[1, 0]], np.eye(2), [1, 1])  # not generating
    with pytest.raises(InvariantError):
        ConeModel.psd(1)


def test_partial_sum_and_complement():
    m = orthant(2)
    a, b = Effect(m, [0.3, 0.2]), Effect(m, [0.5, 0.8])
    assert effect_perp(a, b)
    assert np.allclose(effect_add(a, b).vector, [0.8, 1.0])
    with pytest.raises(UndefinedSumError):
        effect_add(b, b)
    assert np.allclose(complement(a).vector, [0.7, 0.8])
    assert theta(m) == effect_scale(0.0, a)
    assert unit_effect(m).vector.tolist() == [1, 1]
    with pytest.raises(InvariantError):
        effect_scale(1.5, a)
    with pytest.raises(ModelMismatchError):
        effect_add(a, Effect(orthant(3), [0, 0, 0]))


@given(st.lists(st.floats(0, 1), min_size=6, max_size=6))
def test_order_is_transitive_on_orthant(v):
    m = orthant(2)
    x, y, z = np.array(v[:2]), np.array(v[2:4]), np.array(v[4:])
    if leq(m, x, y) and leq(m, y, z):
        assert leq(m, x, z)


def test_model_round_trip_and_unknown_fields():
    for m in (gbit(), ConeModel.psd(2)):
        assert ConeModel.from_dict(m.to_dict()) == m
    d = gbit().to_dict()
    d["extra"] = 1
    with pytest.raises(InvariantError):
        ConeModel.from_dict(d)


def test_effects_are_immutable():
    a = Effect(orthant(2), [0.5, 0.5])
    with pytest.raises(ValueError):
        a.vector[0] = 0.1
