"""Finite instruments, bi-instruments and their coexistence.

An instrument is an outcome-labelled family of operations with a common
source and target whose sum is a channel. Bi-instrument grids are stored
row-major with the first outcome outermost, matching bi-observables.
"""
from fractions import Fraction

import numpy as np

from .cone import PSD, same_model
from .errors import (
    DimensionError,
    InvariantError,
    ModelMismatchError,
    NotMeasuredError,
)
from .feasibility import (
    ConeBlock,
    LPProblem,
    rationalize,
    solve_feasibility,
    verify_certificate,
)
from .observables import (
    BiObservable,
    CoexistenceResult,
    Observable,
    Verdict,
    _labels,
    is_joint,
)
from .operations import Operation, compose, is_channel, match_tol, zero_operation

WITNESS_TOL = 1e-7


def _check_family(ops):
    src, tgt = ops[0].source, ops[0].target
    for op in ops[1:]:
        if op.source != src or op.target != tgt:
            raise ModelMismatchError("instrument operations must share "
                                     "source and target models")
    return src, tgt


def _check_channel_sum(duals, src, tgt, n):
    total = np.sum(duals, axis=0) @ tgt.unit
    if np.max(np.abs(total - src.unit)) > src.tol * max(1, n):
        raise InvariantError("instrument operations do not sum to a channel")


class Instrument:
    """Operations ``I_x`` indexed by outcome labels whose sum is a channel."""

    def __init__(self, operations, outcomes=None):
        ops = list(operations)
        if not ops:
            raise InvariantError("an instrument needs at least one outcome")
        self.source, self.target = _check_family(ops)
        self.outcomes = _labels(outcomes, len(ops))
        self.operations = tuple(ops)
        _check_channel_sum([op.dual for op in ops], self.source, self.target,
                           len(ops))

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, label):
        return self.operations[self.index(label)]

    def index(self, label):
        try:
            return self.outcomes.index(str(label))
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}") from None

    @property
    def duals(self):
        return np.array([op.dual for op in self.operations])

    def close_to(self, other, tol):
        return (self.outcomes == other.outcomes and len(self) == len(other)
                and all(a.close_to(b, tol) for a, b in
                        zip(self.operations, other.operations)))

    def to_dict(self):
        return {"outcomes": list(self.outcomes),
                "operations": [op.to_dict() for op in self.operations]}

    def __repr__(self):
        return (f"<Instrument {list(self.outcomes)} "
                f"{self.source!r} -> {self.target!r}>")


class BiInstrument:
    """Instrument on a product outcome grid, ``ops[i][j]`` for (x_i, y_j)."""

    def __init__(self, grid, outcomes1=None, outcomes2=None):
        rows = [list(r) for r in grid]
        if not rows or not rows[0] or len({len(r) for r in rows}) != 1:
            raise DimensionError("bi-instrument grid must be a nonempty "
                                 "rectangle")
        flat = [op for r in rows for op in r]
        self.source, self.target = _check_family(flat)
        self.outcomes1 = _labels(outcomes1, len(rows))
        self.outcomes2 = _labels(outcomes2, len(rows[0]))
        self.grid = tuple(tuple(r) for r in rows)
        _check_channel_sum([op.dual for op in flat], self.source,
                           self.target, len(flat))

    @property
    def shape(self):
        return len(self.grid), len(self.grid[0])

    def cell(self, x, y):
        return self.grid[self.outcomes1.index(str(x))][
            self.outcomes2.index(str(y))]

    @property
    def duals(self):
        return np.array([[op.dual for op in r] for r in self.grid])

    def marginals(self):
        """(K^1, K^2) with K^1_x = sum_y K_xy and K^2_y = sum_x K_xy."""
        D = self.duals
        src, tgt = self.source, self.target
        m1 = [Operation(src, tgt, d, check_positivity=False)
              for d in D.sum(axis=1)]
        m2 = [Operation(src, tgt, d, check_positivity=False)
              for d in D.sum(axis=0)]
        return (Instrument(m1, self.outcomes1), Instrument(m2, self.outcomes2))

    def flatten(self):
        labels = [f"{x},{y}" for x in self.outcomes1 for y in self.outcomes2]
        return Instrument([op for r in self.grid for op in r], labels)

    def measured(self):
        """The measured bi-observable K^_xy = K_xy*(u2)."""
        cells = self.duals @ self.target.unit
        return BiObservable(self.source, cells, self.outcomes1, self.outcomes2)

    def to_dict(self):
        return {"outcomes1": list(self.outcomes1),
                "outcomes2": list(self.outcomes2),
                "operations": [[op.to_dict() for op in r] for r in self.grid]}

    def __repr__(self):
        return (f"<BiInstrument {self.shape[0]}x{self.shape[1]} "
                f"{self.source!r} -> {self.target!r}>")


def ovm(I, subset):
    """Operation-valued measure I(subset) = sum of I_x over the subset."""
    idx = [I.index(x) for x in subset]
    if len(set(idx)) != len(idx):
        raise InvariantError("subset lists an outcome twice")
    if not idx:
        return zero_operation(I.source, I.target)
    return Operation(I.source, I.target, I.duals[idx].sum(axis=0),
                     check_positivity=False)


def measured_observable(I):
    """The observable with effects I_x*(u2)."""
    return Observable(I.source, I.duals @ I.target.unit, I.outcomes)


def instrument_distribution(I, s):
    """Outcome probabilities I_x(s)(u2)."""
    same_model(I.source, s.model)
    p = (s.covector @ I.duals) @ I.target.unit
    return np.clip(p, 0.0, 1.0)


def compose_instruments(I, J):
    """Bi-instrument with cells I_x then J_y (dual I_x* J_y*)."""
    if I.target != J.source:
        raise ModelMismatchError("I.target differs from J.source")
    grid = [[compose(a, b) for b in J.operations] for a in I.operations]
    return BiInstrument(grid, I.outcomes, J.outcomes)


def is_joint_instrument(K, I, J, tol=WITNESS_TOL):
    """Whether ``K`` has marginals I and J, all cells positive."""
    if K.source != I.source or K.target != I.target:
        return False
    if J.source != I.source or J.target != I.target:
        return False
    if K.shape != (len(I), len(J)):
        return False
    D = K.duals
    src = K.source
    probes = K.target.probe_generators()
    probes = probes / np.linalg.norm(probes, axis=1, keepdims=True)
    for row in D:
        for d in row:
            if any(src.min_value(d @ g) < -tol for g in probes):
                return False
    return (np.max(np.abs(D.sum(axis=1) - I.duals)) <= tol
            and np.max(np.abs(D.sum(axis=0) - J.duals)) <= tol)


def _rational_left_null(G):
    """Exact basis of {c : c @ G = 0} for the rationalised matrix ``G``."""
    rows = [list(r) for r in zip(*rationalize(G))]  # G.T, shape (d, m)
    m = len(rows[0]) if rows else 0
    pivots, r = [], 0
    for col in range(m):
        p = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][col]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    basis = []
    for free in (c for c in range(m) if c not in pivots):
        vec = [Fraction(0)] * m
        vec[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][free]
        basis.append(vec)
    return basis


def joint_instrument_lp(I, J):
    """LP for a joint bi-instrument of two instruments on polyhedral models.

    For each cell (x, y) and each target generator g_j the variable
    v_xyj = K_xy* g_j is constrained to the source cone. Linear relations
    among the generators are imposed on the v's so they come from a linear
    map, and the marginal sums are fixed to I_x* g_j and J_y* g_j.
    """
    src, tgt = I.source, I.target
    G = tgt.generators
    m, d = G.shape[0], src.dim
    n1, n2 = len(I), len(J)
    null = _rational_left_null(G)
    nv = n1 * n2 * m * d

    def col(i, j, k):
        return ((i * n2 + j) * m + k) * d

    rows, rhs = [], []
    for i in range(n1):
        for j in range(n2):
            for c in null:
                R = np.zeros((d, nv))
                for k, ck in enumerate(c):
                    if ck:
                        R[:, col(i, j, k):col(i, j, k) + d] = \
                            float(ck) * np.eye(d)
                rows.append(R)
                rhs.append(np.zeros(d))
    for i in range(n1):
        target = I.duals[i] @ G.T
        for k in range(m):
            R = np.zeros((d, nv))
            for j in range(n2):
                R[:, col(i, j, k):col(i, j, k) + d] = np.eye(d)
            rows.append(R)
            rhs.append(target[:, k])
    for j in range(n2):
        target = J.duals[j] @ G.T
        for k in range(m):
            R = np.zeros((d, nv))
            for i in range(n1):
                R[:, col(i, j, k):col(i, j, k) + d] = np.eye(d)
            rows.append(R)
            rhs.append(target[:, k])
    block = ConeBlock.from_model(src)
    return LPProblem(np.vstack(rows), np.concatenate(rhs),
                     [block] * (n1 * n2 * m))


def instruments_coexist(I, J, candidate=None):
    """Decide whether instruments ``I`` and ``J`` have a joint bi-instrument.

    Polyhedral models are decided by LP; PSD models only verify a supplied
    candidate and otherwise answer UNDECIDED.
    """
    if I.source != J.source or I.target != J.target:
        raise ModelMismatchError("instruments must share source and target")
    if candidate is not None:
        if is_joint_instrument(candidate, I, J):
            return CoexistenceResult(Verdict.FEASIBLE, witness=candidate,
                                     method="supplied")
        if PSD in (I.source.kind, I.target.kind):
            return CoexistenceResult(Verdict.UNDECIDED, method="supplied")
    if PSD in (I.source.kind, I.target.kind):
        return CoexistenceResult(Verdict.UNDECIDED, method="psd-scope")

    problem = joint_instrument_lp(I, J)
    res = solve_feasibility(problem)
    verified = verify_certificate(problem, res)
    if not res.feasible:
        return CoexistenceResult(Verdict.INFEASIBLE,
                                 certificate=res.certificate,
                                 certificate_verified=verified,
                                 problem=problem, lp_result=res, method="lp")
    G = I.target.generators
    pinv = np.linalg.pinv(G)
    n1, n2, m, d = len(I), len(J), G.shape[0], I.source.dim
    V = res.point.reshape(n1, n2, m, d)
    grid = [[Operation(I.source, I.target, (pinv @ V[i, j]).T)
             for j in range(n2)] for i in range(n1)]
    K = BiInstrument(grid, I.outcomes, J.outcomes)
    if not is_joint_instrument(K, I, J):
        raise RuntimeError("LP witness failed re-verification")
    return CoexistenceResult(Verdict.FEASIBLE, witness=K,
                             certificate_verified=verified, problem=problem,
                             lp_result=res, method="lp")


def coexistence_propagates(I, J, K, tol=WITNESS_TOL):
    """Check that a joint bi-instrument's measured grid is joint for (I^, J^).

    Returns False when ``K`` is not a joint bi-instrument for I and J.
    """
    if not is_joint_instrument(K, I, J, tol):
        return False
    return is_joint(K.measured(), measured_observable(I),
                    measured_observable(J), tol)


def _require_measures(A, I):
    same_model(A.model, I.source)
    if len(A) != len(I):
        raise NotMeasuredError("instrument and observable have different "
                               "outcome counts")
    Ihat = I.duals @ I.target.unit
    if np.max(np.abs(Ihat - A.vectors)) > match_tol(A.model):
        raise NotMeasuredError("instrument does not measure the observable")


def sequential_product_observables(A, I, B):
    """Bi-observable (A[I]B)_xy = I_x*(B_y) on the source model."""
    _require_measures(A, I)
    same_model(I.target, B.model)
    cells = np.einsum("xij,yj->xyi", I.duals, B.vectors)
    return BiObservable(A.model, cells, A.outcomes, B.outcomes)


def condition_observable(B, A, I):
    """B conditioned by A relative to I: y -> sum_x I_x*(B_y)."""
    _require_measures(A, I)
    same_model(I.target, B.model)
    total = I.duals.sum(axis=0)
    return Observable(A.model, B.vectors @ total.T, B.outcomes)


def instrument_channel(I):
    """The channel sum_x I_x."""
    op = Operation(I.source, I.target, I.duals.sum(axis=0),
                   check_positivity=False)
    if not is_channel(op):
        raise InvariantError("instrument sum is not a channel")
    return op
