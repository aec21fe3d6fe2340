"""Finite observables, bi-observables and coexistence.

An observable is an outcome-labelled family of effects summing to the
unit. Outcome labels are strings and their order is fixed at construction.
Bi-observables store their grid row-major with the first outcome
outermost.
"""
import enum
from dataclasses import dataclass

import numpy as np

from ._linalg import commute, matrix_sqrt
from .cone import PSD, Effect, _frozen, same_model
from .errors import DimensionError, InvariantError
from .feasibility import (
    ConeBlock,
    FeasibilityResult,
    LPProblem,
    solve_feasibility,
    verify_certificate,
)
from .states import evaluate

WITNESS_TOL = 1e-7


def _labels(outcomes, n):
    labels = [str(x) for x in outcomes] if outcomes is not None \
        else [f"x{i + 1}" for i in range(n)]
    if len(labels) != n:
        raise DimensionError(f"{len(labels)} labels for {n} effects")
    if len(set(labels)) != n:
        raise InvariantError("outcome labels must be distinct")
    return tuple(labels)


def _check_cells(model, cells):
    for v in cells.reshape(-1, model.dim):
        Effect(model, v)


class Observable:
    """Effects ``A_x`` indexed by outcome labels with sum equal to u."""

    def __init__(self, model, effects, outcomes=None):
        E = np.array([e.vector if isinstance(e, Effect) else e
                      for e in effects], dtype=float)
        if E.ndim != 2 or E.shape[1] != model.dim:
            raise DimensionError("effects must be an (n, dim) array")
        self.model = model
        self.outcomes = _labels(outcomes, E.shape[0])
        _check_cells(model, E)
        total = E.sum(axis=0)
        if np.max(np.abs(total - model.unit)) > model.tol * len(E):
            raise InvariantError("observable effects do not sum to the unit")
        self.vectors = _frozen(E)

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, label):
        return Effect(self.model, self.vectors[self.index(label)])

    def index(self, label):
        try:
            return self.outcomes.index(str(label))
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}") from None

    @property
    def effects(self):
        return [Effect(self.model, v) for v in self.vectors]

    def close_to(self, other, tol):
        return (self.model == other.model and self.outcomes == other.outcomes
                and np.max(np.abs(self.vectors - other.vectors)) <= tol)

    def to_dict(self):
        return {"outcomes": list(self.outcomes),
                "effects": self.vectors.tolist()}

    def __repr__(self):
        return f"<Observable {list(self.outcomes)} on {self.model!r}>"


class BiObservable:
    """Observable on a product outcome grid, cells shaped (n1, n2, dim)."""

    def __init__(self, model, cells, outcomes1=None, outcomes2=None):
        C = np.array(cells, dtype=float)
        if C.ndim != 3 or C.shape[2] != model.dim:
            raise DimensionError("cells must be an (n1, n2, dim) array")
        self.model = model
        self.outcomes1 = _labels(outcomes1, C.shape[0])
        self.outcomes2 = _labels(outcomes2, C.shape[1])
        _check_cells(model, C)
        total = C.sum(axis=(0, 1))
        if np.max(np.abs(total - model.unit)) > model.tol * C.shape[0] * \
                C.shape[1]:
            raise InvariantError("bi-observable cells do not sum to the unit")
        self.cells = _frozen(C)

    @property
    def shape(self):
        return self.cells.shape[:2]

    def cell(self, x, y):
        i = self.outcomes1.index(str(x))
        j = self.outcomes2.index(str(y))
        return Effect(self.model, self.cells[i, j])

    def flatten(self):
        """The bi-observable as a plain observable on labels 'x,y'."""
        labels = [f"{x},{y}" for x in self.outcomes1 for y in self.outcomes2]
        return Observable(self.model, self.cells.reshape(-1, self.model.dim),
                          labels)

    def to_dict(self):
        return {"outcomes1": list(self.outcomes1),
                "outcomes2": list(self.outcomes2),
                "cells": self.cells.tolist()}

    def __repr__(self):
        return (f"<BiObservable {self.shape[0]}x{self.shape[1]} on "
                f"{self.model!r}>")


def trivial_observable(model, label="u"):
    return Observable(model, [model.unit], [label])


def binary_observable(a, labels=("yes", "no")):
    """The two-outcome observable {a, a'}."""
    return Observable(a.model, [a.vector, a.model.unit - a.vector], labels)


def evm(A, subset):
    """Effect-valued measure A(subset) = sum of A_x over the subset."""
    idx = [A.index(x) for x in subset]
    if len(set(idx)) != len(idx):
        raise InvariantError("subset lists an outcome twice")
    vec = A.vectors[idx].sum(axis=0) if idx else np.zeros(A.model.dim)
    return Effect(A.model, vec)


def distribution(A, s):
    """Outcome probabilities (s(A_x))_x."""
    same_model(A.model, s.model)
    return np.array([evaluate(s, e) for e in A.effects])


def marginals(C):
    """(C^1, C^2) with C^1_x = sum_y C_xy and C^2_y = sum_x C_xy."""
    m1 = Observable(C.model, C.cells.sum(axis=1), C.outcomes1)
    m2 = Observable(C.model, C.cells.sum(axis=0), C.outcomes2)
    return m1, m2


def is_joint(C, A, B, tol=WITNESS_TOL):
    """Whether ``C`` is a joint bi-observable for ``A`` and ``B``.

    Checks cone membership of every cell and both marginals to ``tol``.
    """
    if C.model != A.model or C.model != B.model:
        return False
    if C.shape != (len(A), len(B)):
        return False
    m = C.model
    if any(m.min_value(v) < -tol or m.min_value(m.unit - v) < -tol
           for v in C.cells.reshape(-1, m.dim)):
        return False
    return (np.max(np.abs(C.cells.sum(axis=1) - A.vectors)) <= tol
            and np.max(np.abs(C.cells.sum(axis=0) - B.vectors)) <= tol)


class Verdict(enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True, eq=False)
class CoexistenceResult:
    """Answer to a coexistence query.

    ``coexist`` is True/False, or None when undecided. ``witness`` is a
    joint bi-observable (or bi-instrument); ``certificate`` is a Farkas
    vector over the marginal equality rows, verified exactly when
    ``certificate_verified`` is True.
    """

    verdict: Verdict
    witness: object = None
    certificate: np.ndarray = None
    certificate_verified: bool = None
    problem: LPProblem = None
    lp_result: FeasibilityResult = None
    method: str = ""

    @property
    def coexist(self):
        if self.verdict is Verdict.UNDECIDED:
            return None
        return self.verdict is Verdict.FEASIBLE

    def __bool__(self):
        return self.verdict is Verdict.FEASIBLE


def joint_lp(A, B):
    """LP for a joint bi-observable: cells C_xy in K with both marginals.

    Variables are the cells in row-major (x, y) order.
    """
    m = A.model
    d = m.dim
    n1, n2 = len(A), len(B)
    nv = n1 * n2 * d
    rows, rhs = [], []
    for i in range(n1):
        R = np.zeros((d, nv))
        for j in range(n2):
            k = (i * n2 + j) * d
            R[:, k:k + d] = np.eye(d)
        rows.append(R)
        rhs.append(A.vectors[i])
    for j in range(n2):
        R = np.zeros((d, nv))
        for i in range(n1):
            k = (i * n2 + j) * d
            R[:, k:k + d] = np.eye(d)
        rows.append(R)
        rhs.append(B.vectors[j])
    block = ConeBlock.from_model(m)
    return LPProblem(np.vstack(rows), np.concatenate(rhs),
                     [block] * (n1 * n2))


def _psd_candidates(A, B):
    m = A.model
    n1, n2 = len(A), len(B)
    if n1 == n2 and np.max(np.abs(A.vectors - B.vectors)) <= m.tol:
        cells = np.zeros((n1, n2, m.dim))
        for i in range(n1):
            cells[i, i] = A.vectors[i]
        yield "diagonal", cells
    mats_a = [m.to_matrix(v) for v in A.vectors]
    mats_b = [m.to_matrix(v) for v in B.vectors]
    if all(commute(a, b) for a in mats_a for b in mats_b):
        cells = np.zeros((n1, n2, m.dim))
        for i, a in enumerate(mats_a):
            r = matrix_sqrt(a, m.tol)
            for j, b in enumerate(mats_b):
                cells[i, j] = m.to_coords(r @ b @ r)
        yield "commuting-product", cells
    if n1 == 1:
        yield "trivial", B.vectors[None, :, :].copy()
    if n2 == 1:
        yield "trivial", A.vectors[:, None, :].copy()


def observables_coexist(A, B, candidate=None):
    """Decide whether observables ``A`` and ``B`` have a joint bi-observable.

    Polyhedral models are decided by LP. For PSD models the function only
    verifies ``candidate`` (a BiObservable or cell array) and a few
    constructive candidates (diagonal, commuting product, trivial); if none
    fits it answers UNDECIDED.
    """
    same_model(A.model, B.model)
    m = A.model
    if candidate is not None:
        cells = candidate.cells if isinstance(candidate, BiObservable) \
            else np.asarray(candidate, dtype=float)
        C = _try_bi(m, cells, A, B)
        if C is not None:
            return CoexistenceResult(Verdict.FEASIBLE, witness=C,
                                     method="supplied")
        if m.kind == PSD:
            return CoexistenceResult(Verdict.UNDECIDED, method="supplied")
    if m.kind == PSD:
        for name, cells in _psd_candidates(A, B):
            C = _try_bi(m, cells, A, B)
            if C is not None:
                return CoexistenceResult(Verdict.FEASIBLE, witness=C,
                                         method=name)
        return CoexistenceResult(Verdict.UNDECIDED, method="psd-scope")

    problem = joint_lp(A, B)
    res = solve_feasibility(problem)
    verified = verify_certificate(problem, res)
    if res.feasible:
        cells = res.point.reshape(len(A), len(B), m.dim)
        C = _try_bi(m, cells, A, B)
        if C is None:
            raise RuntimeError("LP witness failed re-verification")
        return CoexistenceResult(Verdict.FEASIBLE, witness=C,
                                 certificate_verified=verified,
                                 problem=problem, lp_result=res, method="lp")
    return CoexistenceResult(Verdict.INFEASIBLE, certificate=res.certificate,
                             certificate_verified=verified, problem=problem,
                             lp_result=res, method="lp")


def _try_bi(model, cells, A, B):
    cells = np.asarray(cells, dtype=float)
    if cells.shape != (len(A), len(B), model.dim):
        return None
    try:
        C = BiObservable(model, cells, A.outcomes, B.outcomes)
    except InvariantError:
        return None
    return C if is_joint(C, A, B) else None


@dataclass(frozen=True, eq=False)
class EffectCoexistence:
    """Effect-pair coexistence answer with a four-outcome witness.

    When feasible, ``witness`` is an observable on labels
    ``ab, ab', a'b, a'b'`` and ``subset_a`` / ``subset_b`` are the outcome
    subsets whose effect-valued measures equal ``a`` and ``b``.
    """

    verdict: Verdict
    witness: Observable = None
    subset_a: tuple = ()
    subset_b: tuple = ()
    observable_result: CoexistenceResult = None

    @property
    def coexist(self):
        if self.verdict is Verdict.UNDECIDED:
            return None
        return self.verdict is Verdict.FEASIBLE

    def __bool__(self):
        return self.verdict is Verdict.FEASIBLE


_LABELS = ("ab", "ab'", "a'b", "a'b'")


def _effect_candidates(a, b):
    m = a.model
    u, x, y = m.unit, a.vector, b.vector
    z = np.zeros(m.dim)
    # a orthogonal to b; a <= b; b <= a; a' orthogonal to b'
    yield [z, x, y, u - x - y]
    yield [x, z, y - x, u - y]
    yield [y, x - y, z, u - x]
    yield [x + y - u, u - y, u - x, z]


def effects_coexist(a, b, candidate=None):
    """Decide coexistence of two effects via their binary observables."""
    same_model(a.model, b.model)
    m = a.model
    A, B = binary_observable(a), binary_observable(b)
    cand = None
    if candidate is not None:
        cand = np.asarray(candidate.vectors if isinstance(candidate, Observable)
                          else candidate, dtype=float).reshape(2, 2, m.dim)
    elif m.kind == PSD:
        for cells in _effect_candidates(a, b):
            cells = np.array(cells).reshape(2, 2, m.dim)
            if _try_bi(m, cells, A, B) is not None:
                cand = cells
                break
    res = observables_coexist(A, B, candidate=cand)
    if res.verdict is not Verdict.FEASIBLE:
        return EffectCoexistence(res.verdict, observable_result=res)
    W = Observable(m, res.witness.cells.reshape(4, m.dim), _LABELS)
    return EffectCoexistence(Verdict.FEASIBLE, witness=W,
                             subset_a=("ab", "ab'"), subset_b=("ab", "a'b"),
                             observable_result=res)
