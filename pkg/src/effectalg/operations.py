"""Operations between effect algebras, represented by their dual maps.

An operation I from model E1 to model E2 sends states of E1 to substates
of E2. It is stored as the matrix ``dual`` of its dual map I*: V2 -> V1,
so that

    apply(I, s)(b) == s(dual_apply(I, b))

holds as a matrix identity: ``(s @ D) @ b == s @ (D @ b)``.
"""
from dataclasses import dataclass

import numpy as np

from .cone import PSD, Effect, complement, same_model
from .errors import (
    DimensionError,
    InvariantError,
    ModelMismatchError,
    NotMeasuredError,
    ZeroProbabilityError,
)
from .states import State, SubState, maximizing_state, state_vertices

PSD_PROBES = 100
PSD_STATE_PROBES = 50
MATCH_FACTOR = 10


def match_tol(model):
    """Tolerance for equalities of computed effects (one mat-vec of rounding)."""
    return MATCH_FACTOR * model.tol


def _close(x, y, tol):
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) <= tol


class Operation:
    """Positive subunital linear map D: V2 -> V1 (the dual of an operation).

    Parameters
    ----------
    source, target : ConeModel
        E1 and E2. States are mapped source -> target, effects target ->
        source.
    dual : array_like, shape (source.dim, target.dim)
    check_positivity : bool
        Verify D(K2) in K1 on the target's probe generators. Kraus-form
        constructors turn this off because complete positivity already
        holds by construction.
    """

    __slots__ = ("source", "target", "dual")

    def __init__(self, source, target, dual, check_positivity=True):
        D = np.array(dual, dtype=float)
        if D.shape != (source.dim, target.dim):
            raise DimensionError(f"dual matrix has shape {D.shape}, expected "
                                 f"({source.dim}, {target.dim})")
        if not np.all(np.isfinite(D)):
            raise InvariantError("dual matrix has non-finite entries")
        D.setflags(write=False)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "dual", D)
        if check_positivity:
            self._check_positive()
        if not source.contains(source.unit - D @ target.unit):
            raise InvariantError("operation is not subunital: "
                                 "dual(u2) exceeds u1")

    def __setattr__(self, name, value):
        raise AttributeError("Operation is immutable")

    def _check_positive(self):
        src = self.source
        probes = self.target.probe_generators(PSD_PROBES)
        probes = probes / np.linalg.norm(probes, axis=1, keepdims=True)
        for g in probes:
            if src.min_value(self.dual @ g) < -src.tol:
                raise InvariantError("operation is not positive: dual maps a "
                                     "cone vector outside the cone")

    def __repr__(self):
        return (f"<Operation {self.source!r} -> {self.target!r} "
                f"rank={np.linalg.matrix_rank(self.dual)}>")

    def close_to(self, other, tol):
        return (self.source == other.source and self.target == other.target
                and _close(self.dual, other.dual, tol))

    def to_dict(self):
        return {"source": self.source.to_dict(),
                "target": self.target.to_dict(),
                "dual_matrix": self.dual.tolist()}


# -- constructors -------------------------------------------------------
def identity_operation(model):
    return Operation(model, model, np.eye(model.dim))


def zero_operation(source, target):
    return Operation(source, target, np.zeros((source.dim, target.dim)))


def constant_channel(model1, s2):
    """The channel sending every state of ``model1`` to ``s2``.

    Its dual is b -> s2(b) u1.
    """
    return Operation(model1, s2.model, np.outer(model1.unit, s2.covector))


def scale_operation(lam, op):
    if not 0.0 <= lam <= 1.0:
        raise InvariantError(f"scale factor {lam} outside [0, 1]")
    return Operation(op.source, op.target, lam * op.dual,
                     check_positivity=False)


def sum_operations(ops, source=None, target=None):
    """Sum of operations sharing source and target (must stay subunital)."""
    ops = list(ops)
    if not ops:
        if source is None or target is None:
            raise InvariantError("empty sum needs explicit models")
        return zero_operation(source, target)
    src, tgt = ops[0].source, ops[0].target
    for op in ops[1:]:
        same_model(src, op.source)
        same_model(tgt, op.target)
    return Operation(src, tgt, sum(op.dual for op in ops),
                     check_positivity=False)


# -- actions ------------------------------------------------------------
def apply(op, s):
    """Forward action on a (sub)state: s -> s o D."""
    same_model(op.source, s.model)
    return SubState(op.target, s.covector @ op.dual)


def dual_apply(op, b):
    """The effect I*(b) on the source model."""
    same_model(op.target, b.model)
    return Effect(op.source, op.dual @ b.vector)


def dual_apply_vector(op, x):
    """I* applied to an arbitrary vector of the target space."""
    return op.dual @ op.target.vector(x)


def is_channel(op):
    return _close(op.dual @ op.target.unit, op.source.unit, op.source.tol)


def measured_effect(op):
    """The effect I*(u2) measured by ``op``."""
    return Effect(op.source, op.dual @ op.target.unit)


def update_state(op, s):
    """Normalised post-measurement state I(s) / s(I*(u2))."""
    same_model(op.source, s.model)
    p = float(s.covector @ (op.dual @ op.target.unit))
    if p <= op.source.tol:
        raise ZeroProbabilityError(
            f"measured effect has probability {p:.3g} in this state; the "
            "updated state is undefined")
    return State(op.target, (s.covector @ op.dual) / p)


def measures(op, a):
    same_model(op.source, a.model)
    return _close(op.dual @ op.target.unit, a.vector, match_tol(op.source))


def sequential_product_effects(a, op, b):
    """a[I]b = I*(b), defined when ``op`` measures ``a``."""
    if not measures(op, a):
        raise NotMeasuredError("operation does not measure the given effect")
    return dual_apply(op, b)


def compose(op1, op2):
    """Run ``op1`` then ``op2``; the dual is D1 @ D2."""
    if op1.target != op2.source:
        raise ModelMismatchError("op1.target differs from op2.source")
    return Operation(op1.source, op2.target, op1.dual @ op2.dual,
                     check_positivity=False)


# -- repeatability ------------------------------------------------------
def _require_endo(op, a):
    if op.source != op.target:
        raise ModelMismatchError("repeatability needs an operation from a "
                                 "model to itself")
    same_model(op.source, a.model)


def is_repeatable_via(op, a):
    """Whether I*(u) = a and I*(a) = a."""
    _require_endo(op, a)
    t = match_tol(op.source)
    D = op.dual
    return _close(D @ op.target.unit, a.vector, t) and \
        _close(D @ a.vector, a.vector, t)


def _max_multiple_below(model, g, c):
    """Largest lam >= 0 with lam * g <= c (g in K, c in K)."""
    if model.kind == PSD:
        # lam g <= c for rank-one g = |v><v| scaled: use generalized eigen
        w, v = np.linalg.eigh(model.to_matrix(c))
        keep = w > model.tol
        if not np.any(keep):
            return 0.0
        G = model.to_matrix(g)
        vk = v[:, keep]
        inv_sqrt = vk / np.sqrt(w[keep])
        # g must live in the range of c for lam > 0
        resid = G - vk @ (vk.conj().T @ G @ vk) @ vk.conj().T
        if np.max(np.abs(resid)) > 1e-8:
            return 0.0
        m = inv_sqrt.conj().T @ G @ inv_sqrt
        top = float(np.max(np.linalg.eigvalsh(m)))
        return 0.0 if top <= 0 else 1.0 / top
    F = model._facets_unit
    fg = F @ g
    fc = F @ c
    pos = fg > 1e-12
    if not np.any(pos):
        return np.inf
    return float(max(np.min(fc[pos] / fg[pos]), 0.0))


def _orthogonal_battery(model, a):
    """Effects b with a + b <= u that certify condition (iv)."""
    ac = model.unit - a.vector
    out = [ac]
    if model.kind == PSD:
        w, v = np.linalg.eigh(model.to_matrix(ac))
        for mu, vec in zip(w, v.T):
            if mu > model.tol:
                out.append(model.to_coords(mu * np.outer(vec, vec.conj())))
        return out
    for g in model._generators_unit:
        lam = _max_multiple_below(model, g, ac)
        if lam > 0:
            out.append(lam * g)
    return out


def _effect_battery(model):
    """Effects whose images certify condition (v): u, theta, scaled probes."""
    out = [model.unit, model.theta]
    for g in model.probe_generators(20):
        g = g / np.linalg.norm(g)
        lam = _max_multiple_below(model, g, model.unit)
        if np.isfinite(lam) and lam > 0:
            out.append(lam * g)
    return out


def _state_battery(model):
    if model.kind == PSD:
        from .states import random_state
        rng = np.random.default_rng(20240601)
        return [random_state(model, rng) for _ in range(PSD_STATE_PROBES)]
    return state_vertices(model)


@dataclass(frozen=True)
class RepeatabilityConditions:
    """Numerical evaluation of the six equivalent repeatability conditions.

    (i) a is I-repeatable; (ii) a[I]a = a; (iii) a[I]a' = theta;
    (iv) a[I]b = theta whenever a is orthogonal to b; (v) I*(b) <= I*(a) for
    every effect b; (vi) I(I(s))(u) = I(s)(u) for every state s. Every
    condition includes the standing hypothesis that I measures a.
    """

    i: bool
    ii: bool
    iii: bool
    iv: bool
    v: bool
    vi: bool

    def as_tuple(self):
        return (self.i, self.ii, self.iii, self.iv, self.v, self.vi)

    @property
    def agree(self):
        return len(set(self.as_tuple())) == 1


def repeatability_conditions(op, a):
    _require_endo(op, a)
    model = op.source
    t = match_tol(model)
    D = op.dual
    u = model.unit
    measured = _close(D @ u, a.vector, t)

    c1 = is_repeatable_via(op, a)
    try:
        c2 = sequential_product_effects(a, op, a).close_to(a, t)
    except (NotMeasuredError, InvariantError):
        c2 = False
    c3 = measured and _close(D @ complement(a).vector, 0.0, t)
    c4 = measured and all(_close(D @ b, 0.0, t)
                          for b in _orthogonal_battery(model, a))
    Da = D @ a.vector
    c5 = measured and all(model.contains(Da - D @ b)
                          for b in _effect_battery(model))
    if measured:
        DDu = D @ (D @ u)
        Du = D @ u
        c6 = all(abs(float(s.covector @ DDu) - float(s.covector @ Du)) <= t
                 for s in _state_battery(model))
    else:
        c6 = False
    return RepeatabilityConditions(c1, bool(c2), bool(c3), bool(c4),
                                   bool(c5), bool(c6))


@dataclass(frozen=True, eq=False)
class RepeatabilityVerdict:
    repeatable: bool
    max_probability: float
    witness_state: State = None
    witness_operation: Operation = None

    def __bool__(self):
        return self.repeatable


def is_effect_repeatable(a):
    """Decide whether some operation repeats ``a``.

    ``a`` is repeatable iff a = theta or some state gives it probability 1.
    A witness is the operation s -> s(a) s1 for a state s1 with s1(a) = 1,
    whose dual is b -> s1(b) a.
    """
    model = a.model
    value, s1 = maximizing_state(a)
    if float(np.max(np.abs(a.vector))) <= model.tol:
        return RepeatabilityVerdict(True, value, None,
                                    zero_operation(model, model))
    if value >= 1.0 - model.tol:
        op = Operation(model, model, np.outer(a.vector, s1.covector))
        return RepeatabilityVerdict(True, value, s1, op)
    return RepeatabilityVerdict(False, value)
