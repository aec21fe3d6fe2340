"""States and substates as positive linear functionals on V.

A state is stored as a covector ``s`` with ``s @ g >= 0`` on the cone and
``s @ u == 1``; a substate drops unitality to ``0 <= s @ u <= 1``. For PSD
models the covector is the coordinate vector of the density matrix, so the
pairing ``s @ x`` is the Born rule ``tr(rho X)``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cone import PSD, Effect, ConeModel, _frozen, extreme_rays, same_model
from .errors import InvariantError, UnsupportedModelError
from .feasibility import ConeBlock, LPProblem, solve_feasibility


@dataclass(frozen=True, eq=False)
class SubState:
    model: ConeModel
    covector: np.ndarray

    def __post_init__(self):
        s = _frozen(self.model.vector(self.covector))
        object.__setattr__(self, "covector", s)
        self._check()

    def _check(self):
        m = self.model
        if m.dual_min_value(self.covector) < -m.tol:
            raise InvariantError("functional is negative on the cone")
        mass = self.mass
        if mass < -m.tol or mass > 1 + m.tol:
            raise InvariantError(f"substate mass {mass} outside [0, 1]")

    @property
    def mass(self):
        """Value on the unit, s(u)."""
        return float(self.covector @ self.model.unit)

    def __call__(self, x):
        """Raw linear pairing with an effect or any vector of V."""
        if isinstance(x, Effect):
            same_model(self.model, x.model)
            x = x.vector
        return float(self.covector @ self.model.vector(x))

    def normalized(self):
        mass = self.mass
        if mass <= self.model.tol:
            raise InvariantError("cannot normalise a zero substate")
        return State(self.model, self.covector / mass)

    def close_to(self, other, tol=None):
        same_model(self.model, other.model)
        tol = self.model.tol if tol is None else tol
        return float(np.max(np.abs(self.covector - other.covector))) <= tol

    def __repr__(self):
        name = type(self).__name__
        return f"{name}({np.array2string(self.covector, precision=6)})"


class State(SubState):
    """A positive linear functional with s(u) = 1."""

    def _check(self):
        super()._check()
        if abs(self.mass - 1.0) > self.model.tol:
            raise InvariantError(f"state is not unital: s(u) = {self.mass}")


def evaluate(s, a):
    """Probability that effect ``a`` occurs in (sub)state ``s``."""
    same_model(s.model, a.model)
    return float(np.clip(s.covector @ a.vector, 0.0, 1.0))


def mix_states(weights, states):
    """Convex (or subconvex) combination of states.

    Returns a :class:`State` when the weights sum to one, otherwise a
    :class:`SubState`.
    """
    weights = [float(w) for w in weights]
    states = list(states)
    if len(weights) != len(states) or not states:
        raise InvariantError("need one weight per state and at least one state")
    model = states[0].model
    for s in states[1:]:
        same_model(model, s.model)
    tol = model.tol
    if any(w < 0 or w > 1 for w in weights):
        raise InvariantError("mixture weights must lie in [0, 1]")
    total = sum(weights)
    if total > 1 + tol:
        raise InvariantError(f"mixture weights sum to {total} > 1")
    cov = sum(w * s.covector for w, s in zip(weights, states))
    if abs(total - 1.0) <= tol:
        return State(model, cov)
    return SubState(model, cov)


@lru_cache(maxsize=64)
def _vertices(model):
    rays = extreme_rays(model.generators)
    out = []
    for r in rays:
        # snap SVD noise so vertices print and compare cleanly
        r = np.round(r / (r @ model.unit), 12) + 0.0
        out.append(State(model, r))
    return tuple(out)


def state_vertices(model):
    """Extreme points of the state space of a polyhedral model."""
    if model.kind == PSD:
        raise UnsupportedModelError("extreme states of a psd model form a "
                                    "continuum")
    return list(_vertices(model))


class StateSet:
    """Either the full state space of a model or a finite list of states."""

    def __init__(self, model, states=None):
        self.model = model
        self.states = None if states is None else tuple(states)
        for s in self.states or ():
            same_model(model, s.model)

    @classmethod
    def full(cls, model):
        return cls(model)

    @classmethod
    def finite(cls, states):
        states = list(states)
        if not states:
            raise InvariantError("finite state set must be nonempty")
        return cls(states[0].model, states)

    @property
    def is_full(self):
        return self.states is None


def is_order_determining(S, model=None):
    """Whether a state set determines the cone order.

    A finite set is order-determining iff its covectors positively span
    the dual cone, i.e. every facet normal of K is a nonnegative
    combination of them (decided by LP). No finite set spans the dual of a
    PSD cone.
    """
    model = S.model if model is None else model
    same_model(S.model, model)
    if S.is_full:
        return True
    if model.kind == PSD:
        return False
    cov = np.array([s.covector for s in S.states]).T
    block = ConeBlock.orthant(cov.shape[1])
    for f in model.facets:
        if not solve_feasibility(LPProblem(cov, f, [block])).feasible:
            return False
    return True


def maximizing_state(a):
    """A state attaining the maximum of s(a) over the full state space.

    Returns ``(value, state)``.
    """
    model = a.model
    if model.kind == PSD:
        w, v = np.linalg.eigh(model.to_matrix(a.vector))
        top = v[:, -1]
        rho = np.outer(top, top.conj())
        return float(w[-1]), State(model, model.to_coords(rho))
    verts = _vertices(model)
    vals = [float(s.covector @ a.vector) for s in verts]
    i = int(np.argmax(vals))
    return vals[i], verts[i]


def max_over_states(a):
    return maximizing_state(a)[0]


def random_state(model, rng):
    """Random state: Dirichlet mixture of vertices, or a random density."""
    if model.kind == PSD:
        n = model.hilbert_dim
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        return State(model, model.to_coords(rho))
    verts = _vertices(model)
    w = rng.dirichlet(np.ones(len(verts)))
    return State(model, sum(wi * s.covector for wi, s in zip(w, verts)))


def random_effect(model, rng):
    """Random effect: a convex mix of theta, u and scaled cone vectors."""
    if model.kind == PSD:
        n = model.hilbert_dim
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = g @ g.conj().T
        w, v = np.linalg.eigh(h)
        evals = rng.uniform(0, 1, size=n)
        return Effect(model, model.to_coords((v * evals) @ v.conj().T))
    G = model.generators
    c = rng.exponential(size=len(G)) * (rng.uniform(size=len(G)) < 0.7)
    x = c @ G
    t = model.order_unit_norm(x)
    if t == 0:
        return Effect(model, model.theta)
    return Effect(model, x * rng.uniform(0, 1) / t)
