import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from factories import rand_effect, rand_observable, rand_state
from effectalg import (
    ConeModel,
    Effect,
    HilbertModel,
    InvariantError,
    MixedHolevo,
    Observable,
    State,
    apply,
    commutant,
    commutant_laws,
    constant_channel,
    dual_apply,
    gbit,
    holevo_compose_identity,
    holevo_seq_effects,
    holevo_seq_observables,
    is_channel,
    is_pure_representable,
    marginals,
    measured_effect,
    measured_observable,
    mixed_holevo,
    mixed_holevo_instrument,
    orthant,
    pure_holevo,
    pure_holevo_instrument,
)
from effectalg.holevo import (
    commutant_witnesses,
    holevo_product_laws,
    mixed_instrument_channel_image,
    mixture_decomposition,
    mixture_matches,
)

M2 = orthant(2)
UNI = State(M2, [0.5, 0.5])


def test_pure_holevo_basics():
    a = Effect(M2, [1, 0])
    H = pure_holevo(a, UNI)
    b = Effect(M2, [0.2, 0.6])
    assert np.allclose(dual_apply(H, b).vector, [0.4, 0])
    assert np.allclose(measured_effect(H).vector, a.vector)
    u = Effect(M2, M2.unit)
    assert pure_holevo(u, UNI).close_to(constant_channel(M2, UNI), 0)
    assert np.allclose(pure_holevo(Effect(M2, [0, 0]), UNI).dual, 0)


def test_mixed_holevo_channel_iff_effects_sum_to_unit():
    a = Effect(M2, [0.3, 0.6])
    ac = Effect(M2, [0.7, 0.4])
    S1 = State(M2, [1, 0])
    assert is_channel(mixed_holevo([(a, S1), (ac, UNI)]))
    assert not is_channel(mixed_holevo([(a, S1), (Effect(M2, [0.5, 0.4]), UNI)]))
    with pytest.raises(InvariantError):
        mixed_holevo([(a, S1), (Effect(M2, [0.8, 0.4]), UNI)])


@given(st.integers(0, 100_000))
def test_collapse_identities(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(3), gbit(), ConeModel.psd(2)][seed % 3]
    lam = rng.dirichlet(np.ones(3)) * rng.uniform(0.5, 1)
    a_s = [rand_effect(m, rng) for _ in range(3)]
    b_s = [rand_state(m, rng) for _ in range(3)]
    beta, a = b_s[0], a_s[0]
    # shared state
    I = mixed_holevo([(Effect(m, l * x.vector), beta) for l, x in zip(lam, a_s)])
    expect = pure_holevo(Effect(m, sum(l * x.vector for l, x in zip(lam, a_s))), beta)
    assert np.max(np.abs(I.dual - expect.dual)) <= 1e-12
    r = is_pure_representable(I)
    assert r.pure and np.max(np.abs(np.outer(r.effect.vector, r.state.covector) - I.dual)) <= 1e-9
    # shared effect
    J = mixed_holevo([(Effect(m, l * a.vector), b) for l, b in zip(lam, b_s)])
    mix = State(m, sum(l * b.covector for l, b in zip(lam, b_s)) / lam.sum())
    expect = pure_holevo(Effect(m, lam.sum() * a.vector), mix)
    assert np.max(np.abs(J.dual - expect.dual)) <= 1e-12
    # mixture of pures rewritten as a mixed Holevo operation
    lhs = sum(l * pure_holevo(x, b).dual for l, x, b in zip(lam, a_s, b_s))
    rhs = mixed_holevo([(Effect(m, l * x.vector), b)
                        for l, x, b in zip(lam, a_s, b_s)]).dual
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_non_pure_example_on_qubit():
    H = HilbertModel(2)
    a = H.effect(np.diag([1, 0]))
    ac = H.effect(np.diag([0, 1]))
    b1, b2 = H.state(np.diag([1, 0])), H.state(np.diag([0, 1]))
    assert b1(a) == pytest.approx(1) and b2(ac) == pytest.approx(1)
    for lam in (0.5, 0.3):
        I = MixedHolevo(((Effect(H.model, lam * a.vector), b1),
                         (Effect(H.model, (1 - lam) * ac.vector), b2)))
        r = is_pure_representable(I)
        assert not r.pure and r.rank == 2


def test_pure_ops_are_pure():
    H = pure_holevo(Effect(gbit(), [0.5, 0.2, 0.1]), State(gbit(), [1, 1, -1]))
    r = is_pure_representable(H)
    assert r.pure and r.rank == 1
    assert np.allclose(r.state.covector, [1, 1, -1])
    assert np.allclose(r.effect.vector, [0.5, 0.2, 0.1])


def test_holevo_product_examples():
    a = Effect(M2, [1, 0])
    assert np.allclose(holevo_seq_effects(a, UNI, Effect(M2, [0.2, 0.6])).vector, [0.4, 0])
    assert np.allclose(holevo_seq_effects(a, UNI, Effect(M2, M2.unit)).vector, a.vector)
    th = Effect(M2, [0, 0])
    assert np.allclose(holevo_seq_effects(th, UNI, a).vector, 0)


def test_product_fixture_one_sided_zero():
    # a = u, alpha(b) = 0, b != theta: a[alpha]b = theta but b[alpha]a = b
    alpha = State(M2, [1, 0])
    u, b = Effect(M2, M2.unit), Effect(M2, [0, 0.7])
    assert np.allclose(holevo_seq_effects(u, alpha, b).vector, 0)
    assert np.allclose(holevo_seq_effects(b, alpha, u).vector, b.vector)


@given(st.integers(0, 100_000))
def test_product_laws(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(2), orthant(3), gbit(), ConeModel.psd(2)][seed % 4]
    alpha, beta = rand_state(m, rng), rand_state(m, rng)
    a, b, c = (rand_effect(m, rng) for _ in range(3))
    laws = holevo_product_laws(alpha, beta, a, b, c, lam=rng.uniform())
    assert all(v in (True, None) for v in laws.values()), laws


def test_commutant_examples():
    a, b = Effect(M2, [1, 0]), Effect(M2, [0, 1])
    assert np.allclose(commutant(UNI, a, b), [0.5, -0.5])
    assert np.allclose(commutant(UNI, a, a), 0)
    zero, unit = commutant_witnesses(UNI, a)
    assert np.allclose(zero, 0)
    assert np.allclose(unit, [0.5, -0.5])


@given(st.integers(0, 100_000))
def test_commutant_laws(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(2), orthant(3), gbit(), ConeModel.psd(2)][seed % 4]
    alpha = rand_state(m, rng)
    a, b, c = (rand_effect(m, rng) for _ in range(3))
    laws = commutant_laws(alpha, a, b, c, lam=rng.uniform())
    assert all(v in (True, None) for v in laws.values()), laws


@given(st.integers(0, 100_000))
def test_mixed_instruments(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(3), gbit(), ConeModel.psd(2)][seed % 3]
    n = int(rng.integers(1, 4))
    lam = rng.dirichlet(np.ones(n))
    obs = [rand_observable(m, rng, 2) for _ in range(n)]
    labels = obs[0].outcomes
    tables = [[rand_state(m, rng) for _ in labels] for _ in range(n)]
    I = mixed_holevo_instrument(lam, obs, tables)
    expect = sum(l * A.vectors for l, A in zip(lam, obs))
    assert np.max(np.abs(measured_observable(I).vectors - expect)) <= 1e-12
    alpha = rand_state(m, rng)
    total = sum(apply(op, alpha).covector for op in I.operations)
    image = mixed_instrument_channel_image(lam, obs, tables, alpha)
    assert np.max(np.abs(total - image.covector)) <= 1e-12


def test_holevo_seq_observables_marginals():
    g = gbit()
    A = Observable(g, [[0.5, 0.5, 0], [0.5, -0.5, 0]])
    B = Observable(g, [[0.5, 0, 0.5], [0.5, 0, -0.5]])
    betas = [State(g, [1, 1, 1]), State(g, [1, 0, 0])]
    C = holevo_seq_observables(A, betas, B)
    m1, m2 = marginals(C)
    assert m1.close_to(A, 1e-12)
    assert np.allclose(C.cells[0, 0], 1.0 * A.vectors[0])
    assert np.allclose(C.cells[1, 0], 0.5 * A.vectors[1])
    I = pure_holevo_instrument(A, betas)
    assert np.allclose(m2.vectors, [sum(b(B.vectors[y]) * A.vectors[x]
                                        for x, b in enumerate(betas))
                                    for y in range(2)])
    assert measured_observable(I).close_to(A, 0)


@given(st.integers(0, 100_000))
def test_compose_identity(seed):
    rng = np.random.default_rng(seed)
    m = [orthant(3), gbit(), ConeModel.psd(2)][seed % 3]
    A, B = rand_observable(m, rng), rand_observable(m, rng)
    alphas = [rand_state(m, rng) for _ in range(len(A))]
    betas = [rand_state(m, rng) for _ in range(len(B))]
    rep = holevo_compose_identity(A, alphas, B, betas)
    assert rep.holds(1e-12), rep.max_error


def test_mixture_search_is_silent_on_failure():
    a = Effect(M2, [1, 0])
    ac = Effect(M2, [0, 1])
    terms = [(a, State(M2, [1, 0])), (ac, State(M2, [0, 1]))]
    # norms sum to 2 > 1: the simple rescaling finds nothing
    assert mixture_decomposition(terms) is None
    small = [(Effect(M2, [0.3, 0]), State(M2, [1, 0])),
             (Effect(M2, [0, 0.4]), State(M2, [0, 1]))]
    mix = mixture_decomposition(small)
    assert mix is not None and mixture_matches(small, mix)
    assert sum(w for w, _ in mix) == pytest.approx(1)
