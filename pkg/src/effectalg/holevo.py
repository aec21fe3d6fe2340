"""Measure-and-prepare (Holevo) operations and instruments.

The pure Holevo operation with effect ``a`` and state ``beta`` sends a state
``alpha`` to ``alpha(a) beta``; its dual is ``b -> beta(b) a``, i.e. the
rank-one matrix ``outer(a, beta)``. Mixed Holevo operations are sums of
pure ones. Also here: the state-indexed product ``a[beta]b = beta(b) a``
and the commutant ``[a, b]_alpha = alpha(b) a - alpha(a) b``.
"""
from dataclasses import dataclass, field

import numpy as np

from .cone import Effect, same_model
from .errors import DimensionError, InvariantError
from .instruments import BiInstrument, Instrument, compose_instruments
from .observables import BiObservable, Observable
from .operations import Operation, match_tol
from .states import State, maximizing_state

PURITY_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class PureHolevo:
    """Pure Holevo operation H^(a, beta) in structured form."""

    effect: Effect
    state: State

    def operation(self):
        return pure_holevo(self.effect, self.state)

    def to_dict(self):
        return {"type": "pure_holevo", "effect": self.effect.vector.tolist(),
                "state": self.state.covector.tolist()}


@dataclass(frozen=True, eq=False)
class MixedHolevo:
    """Mixed Holevo operation sum_i H^(a_i, beta_i) in structured form."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((a, b) for a, b in self.terms)
        if not terms:
            raise InvariantError("mixed Holevo operation needs a term")
        object.__setattr__(self, "terms", terms)

    def operation(self):
        return mixed_holevo(self.terms)

    def to_dict(self):
        return {"type": "mixed_holevo",
                "terms": [{"effect": a.vector.tolist(),
                           "state": b.covector.tolist()}
                          for a, b in self.terms]}


def pure_holevo(a, beta):
    """H^(a, beta) as an Operation from a.model to beta.model.

    The dual matrix is outer(a, beta); positivity holds because a is in the
    source cone and beta is positive on the target cone.
    """
    if not isinstance(beta, State):
        raise InvariantError("Holevo operations need a normalised state")
    return Operation(a.model, beta.model, np.outer(a.vector, beta.covector),
                     check_positivity=False)


def mixed_holevo(terms):
    """sum_i H^(a_i, beta_i); requires sum_i a_i <= u1."""
    terms = list(terms)
    if not terms:
        raise InvariantError("mixed Holevo operation needs a term")
    src, tgt = terms[0][0].model, terms[0][1].model
    for a, b in terms:
        same_model(src, a.model)
        same_model(tgt, b.model)
        if not isinstance(b, State):
            raise InvariantError("Holevo operations need normalised states")
    total = sum(a.vector for a, _ in terms)
    if not src.contains(src.unit - total):
        raise InvariantError("mixed Holevo effects sum beyond the unit")
    D = sum(np.outer(a.vector, b.covector) for a, b in terms)
    return Operation(src, tgt, D, check_positivity=False)


@dataclass(frozen=True, eq=False)
class PurityResult:
    """Outcome of :func:`is_pure_representable`.

    When ``pure`` is True, ``effect`` and ``state`` give D = outer(b, beta).
    ``singular_values`` are those of the dual matrix.
    """

    pure: bool
    effect: Effect = None
    state: State = None
    singular_values: np.ndarray = field(default=None, repr=False)

    @property
    def rank(self):
        s = self.singular_values
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > PURITY_RTOL * s[0]))

    def __bool__(self):
        return self.pure


def is_pure_representable(op):
    """Whether an operation equals H^(b, beta) for some effect b and state beta.

    Accepts an Operation or a :class:`MixedHolevo`. Decided from the rank of
    the dual matrix (singular values below 1e-8 times the largest count as
    zero); a rank-one dual is factored with beta normalised by beta(u2) = 1.
    """
    if isinstance(op, (MixedHolevo, PureHolevo)):
        op = op.operation()
    src, tgt = op.source, op.target
    D = op.dual
    U, s, Vt = np.linalg.svd(D)
    if s.size == 0 or s[0] <= src.tol:
        beta = maximizing_state(Effect(tgt, tgt.unit))[1]
        return PurityResult(True, Effect(src, src.theta), beta, s)
    if s.size > 1 and s[1] > PURITY_RTOL * s[0]:
        return PurityResult(False, singular_values=s)
    v = Vt[0]
    mass = float(v @ tgt.unit)
    if abs(mass) <= src.tol:
        return PurityResult(False, singular_values=s)
    beta_vec = v / mass
    b_vec = s[0] * mass * U[:, 0]
    try:
        beta = State(tgt, beta_vec)
        b = Effect(src, b_vec)
    except InvariantError:
        return PurityResult(False, singular_values=s)
    return PurityResult(True, b, beta, s)


def holevo_seq_effects(a, beta, b):
    """a[beta]b = beta(b) a."""
    same_model(beta.model, b.model)
    return Effect(a.model, beta(b) * a.vector)


def _states_for(A, states):
    states = list(states)
    if len(states) != len(A):
        raise DimensionError(f"{len(states)} states for {len(A)} outcomes")
    for s in states[1:]:
        same_model(states[0].model, s.model)
    return states


def pure_holevo_instrument(A, states):
    """Instrument x -> H^(A_x, beta_x), which measures A."""
    states = _states_for(A, states)
    return Instrument([pure_holevo(a, b) for a, b in zip(A.effects, states)],
                      A.outcomes)


def _check_weights(weights):
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InvariantError("need a nonempty weight vector")
    if np.any(w < 0) or np.any(w > 1) or abs(w.sum() - 1.0) > 1e-12:
        raise InvariantError("mixture weights must lie in [0,1] and sum to 1")
    return w


def mixed_holevo_instrument(weights, observables, state_tables):
    """Instrument x -> sum_i lam_i H^(A_ix, beta_ix).

    All observables must share the outcome labels.
    """
    w = _check_weights(weights)
    obs = list(observables)
    tables = [_states_for(A, t) for A, t in zip(obs, state_tables)]
    if not (len(w) == len(obs) == len(tables)):
        raise DimensionError("weights, observables and state tables differ "
                             "in length")
    labels = obs[0].outcomes
    for A in obs[1:]:
        same_model(obs[0].model, A.model)
        if A.outcomes != labels:
            raise InvariantError("observables must share outcome labels")
    src, tgt = obs[0].model, tables[0][0].model
    ops = []
    for x in range(len(labels)):
        D = sum(lam * np.outer(A.vectors[x], t[x].covector)
                for lam, A, t in zip(w, obs, tables))
        ops.append(Operation(src, tgt, D, check_positivity=False))
    return Instrument(ops, labels)


def mixed_instrument_channel_image(weights, observables, state_tables, alpha):
    """sum_i lam_i alpha_i with alpha_i = sum_x alpha(A_ix) beta_ix."""
    w = _check_weights(weights)
    cov = 0.0
    for lam, A, t in zip(w, observables, state_tables):
        cov = cov + lam * sum(alpha(A.vectors[x]) * t[x].covector
                              for x in range(len(A)))
    return State(state_tables[0][0].model, cov)


def holevo_seq_observables(A, states, B):
    """Bi-observable (x, y) -> beta_x(B_y) A_x."""
    states = _states_for(A, states)
    for s in states:
        same_model(s.model, B.model)
    probs = np.array([[s(b) for b in B.vectors] for s in states])
    cells = probs[:, :, None] * A.vectors[:, None, :]
    return BiObservable(A.model, cells, A.outcomes, B.outcomes)


@dataclass(frozen=True, eq=False)
class HolevoComposition:
    """Composition of two pure Holevo instruments and its marginals.

    ``composed`` is H^(A,alpha) followed by H^(B,beta); ``expected`` is the
    pure Holevo bi-instrument on A∘B with states beta'_xy = beta_y.
    ``delta`` and ``C`` define the predicted marginals H^(A,delta) and
    H^(C,beta).
    """

    composed: BiInstrument
    expected: BiInstrument
    product: BiObservable
    delta: tuple
    C: Observable
    first_marginal: Instrument
    second_marginal: Instrument
    expected_first: Instrument
    expected_second: Instrument
    max_error: float

    def holds(self, tol=1e-12):
        return self.max_error <= tol


def holevo_compose_identity(A, alphas, B, betas):
    """Compose H^(A, alpha) with H^(B, beta) and compare to the closed forms."""
    I = pure_holevo_instrument(A, alphas)
    J = pure_holevo_instrument(B, betas)
    K = compose_instruments(I, J)
    P = holevo_seq_observables(A, alphas, B)
    betas = list(betas)
    grid = [[pure_holevo(P.cell(x, y), betas[j])
             for j, y in enumerate(B.outcomes)] for x in A.outcomes]
    expected = BiInstrument(grid, A.outcomes, B.outcomes)

    tgt = betas[0].model
    delta = tuple(State(tgt, sum(alphas[i](B.vectors[j]) * betas[j].covector
                                 for j in range(len(B))))
                  for i in range(len(A)))
    C = Observable(A.model, P.cells.sum(axis=0), B.outcomes)
    first, second = K.marginals()
    exp1 = pure_holevo_instrument(A, delta)
    exp2 = pure_holevo_instrument(C, betas)
    err = max(float(np.max(np.abs(K.duals - expected.duals))),
              float(np.max(np.abs(first.duals - exp1.duals))),
              float(np.max(np.abs(second.duals - exp2.duals))))
    return HolevoComposition(K, expected, P, delta, C, first, second, exp1,
                             exp2, err)


# -- commutant ----------------------------------------------------------
def commutant(alpha, a, b):
    """[a, b]_alpha = alpha(b) a - alpha(a) b, a vector of V (maybe outside K)."""
    same_model(alpha.model, a.model)
    same_model(a.model, b.model)
    return alpha(b) * a.vector - alpha(a) * b.vector


def _zero(x, tol):
    return float(np.max(np.abs(x))) <= tol


def commutant_laws(alpha, a, b, c, lam=0.5, tol=1e-10):
    """Evaluate the commutant laws on one (alpha, a, b, c) instance.

    Returns a dict of booleans. Laws whose hypothesis fails on the
    instance are reported as None.
    """
    m = a.model
    u = Effect(m, m.unit)
    out = {}
    ac = commutant(alpha, a, c)
    ab_prod = holevo_seq_effects(a, alpha, b)
    out["zero_if_zero"] = (_zero(commutant(alpha, ab_prod, c), tol)
                           if _zero(ac, tol) else None)
    if m.contains(m.unit - a.vector - b.vector):
        s = Effect(m, a.vector + b.vector)
        out["additive"] = _zero(commutant(alpha, s, c) - ac
                                - commutant(alpha, b, c), tol)
    else:
        out["additive"] = None
    out["unit_formula"] = _zero(commutant(alpha, a, u)
                                - (a.vector - alpha(a) * m.unit), tol)
    out["antisymmetric"] = _zero(commutant(alpha, a, b)
                                 + commutant(alpha, b, a), tol)
    out["scaling"] = _zero(commutant(alpha, Effect(m, lam * a.vector), b)
                           - lam * commutant(alpha, a, b), tol)
    out["self_zero"] = _zero(commutant(alpha, a, a), tol)
    out["alpha_annihilates"] = abs(alpha(commutant(alpha, a, b))) <= tol
    out["theta_zero"] = _zero(commutant(alpha, a, Effect(m, m.theta)), tol)
    return out


def commutant_witnesses(alpha, a):
    """Commutants of ``a`` with theta and with u = theta'.

    [a, theta]_alpha is always zero while [a, u]_alpha = a - alpha(a) u is
    nonzero unless a is a multiple of u, so b = theta shows that a zero
    commutant with b does not force a zero commutant with b'.

    Returns ``(with_theta, with_unit)``.
    """
    m = a.model
    return (commutant(alpha, a, Effect(m, m.theta)),
            commutant(alpha, a, Effect(m, m.unit)))


def holevo_product_laws(alpha, beta, a, b, c, lam=0.5, tol=1e-10):
    """Evaluate the laws of the state-indexed product on one instance.

    ``alpha`` and ``beta`` are states and ``a, b, c`` effects on one model.
    Returns a dict of booleans; laws whose hypothesis fails are None.
    """
    m = a.model
    u = Effect(m, m.unit)
    th = Effect(m, m.theta)
    P = holevo_seq_effects
    out = {}

    def eq(x, y):
        return _zero(x.vector - y.vector, tol)

    out["scale_left"] = eq(P(Effect(m, lam * a.vector), beta, b),
                           Effect(m, lam * P(a, beta, b).vector))
    out["scale_right"] = eq(P(a, beta, Effect(m, lam * b.vector)),
                            Effect(m, lam * P(a, beta, b).vector))
    if m.contains(m.unit - a.vector - b.vector):
        s = Effect(m, a.vector + b.vector)
        out["additive_left"] = _zero(P(s, beta, c).vector - P(a, beta, c).vector
                                     - P(b, beta, c).vector, tol)
        out["additive_right"] = _zero(P(c, beta, s).vector
                                      - P(c, beta, a).vector
                                      - P(c, beta, b).vector, tol)
    else:
        out["additive_left"] = out["additive_right"] = None
    mix = State(m, lam * alpha.covector + (1 - lam) * beta.covector)
    out["convex_state"] = _zero(P(a, mix, b).vector
                                - lam * P(a, alpha, b).vector
                                - (1 - lam) * P(a, beta, b).vector, tol)
    out["zero_left"] = eq(P(th, beta, b), th)
    out["zero_right"] = eq(P(b, beta, th), th)
    out["unit_right"] = eq(P(a, beta, u), a)
    out["unit_left"] = _zero(P(u, beta, b).vector - beta(b) * m.unit, tol)
    out["below_left"] = m.contains(a.vector - P(a, beta, b).vector)
    out["associative"] = eq(P(a, alpha, P(b, beta, c)),
                            P(P(a, alpha, b), beta, c))
    # u[beta]b = b forces b to be a multiple of u
    ub = P(u, beta, b)
    if eq(ub, b):
        out["unit_left_fixed"] = _zero(b.vector - beta(b) * m.unit, tol)
    else:
        out["unit_left_fixed"] = None
    return out


def mixture_decomposition(terms):
    """Try to write sum_i H^(a_i, beta_i) as a convex mixture of pure ones.

    Uses the rescaling lam_i = ||a_i|| (order-unit norm): when the norms sum
    to at most one, sum_i lam_i H^(a_i / lam_i, beta_i) plus the leftover
    weight on H^(theta, beta_0) is such a mixture. Returns a list of
    ``(weight, PureHolevo)`` or None when this search finds nothing. A None
    answer proves nothing either way.
    """
    terms = [(a, b) for a, b in terms]
    m = terms[0][0].model
    norms = [m.order_unit_norm(a.vector) for a, _ in terms]
    total = sum(norms)
    if total > 1 + m.tol:
        return None
    out = []
    for (a, b), n in zip(terms, norms):
        if n > 0:
            out.append((n, PureHolevo(Effect(m, a.vector / n), b)))
    rest = 1.0 - total
    if rest > 0:
        out.append((rest, PureHolevo(Effect(m, m.theta), terms[0][1])))
    return out


def mixture_matches(terms, mixture, tol=None):
    """Whether a mixture from :func:`mixture_decomposition` reproduces terms."""
    D = mixed_holevo(terms).dual
    src = terms[0][0].model
    tol = match_tol(src) if tol is None else tol
    M = sum(w * p.operation().dual for w, p in mixture)
    return float(np.max(np.abs(D - M))) <= tol
