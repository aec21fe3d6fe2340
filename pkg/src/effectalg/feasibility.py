"""Phase-1 simplex feasibility with Farkas certificates.

Problems have the form::

    A @ x = b,   x = (x_1, ..., x_k),   x_j in K_j

where every K_j is a polyhedral cone carried by a :class:`ConeBlock` with
both generators and facets. Internally each block is parametrised by its
generators, ``x_j = G_j.T @ lam_j`` with ``lam_j >= 0``, which turns the
problem into standard form ``M @ lam = b, lam >= 0``. That system is decided
by a dense Bland-rule phase-1 simplex (see :mod:`effectalg._kernels`).

If the system is infeasible the phase-1 duals give a vector ``y`` with
``A_j.T @ y`` nonnegative on every generator of ``K_j`` and ``b @ y < 0``.
:func:`verify_certificate` re-checks either outcome in exact rational
arithmetic.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DimensionError

PIVOT_TOL = 1e-10
INFEASIBLE_TOL = 1e-9
POINT_TOL = Fraction(1, 10**7)
CERT_MARGIN = Fraction(1, 10**9)
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True, eq=False)
class ConeBlock:
    """A block of LP variables constrained to a polyhedral cone."""

    generators: np.ndarray
    facets: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.generators, dtype=float))
        F = np.atleast_2d(np.asarray(self.facets, dtype=float))
        if G.shape[1] != F.shape[1]:
            raise DimensionError("generators and facets disagree on size")
        object.__setattr__(self, "generators", G)
        object.__setattr__(self, "facets", F)

    @property
    def size(self):
        return self.generators.shape[1]

    @classmethod
    def orthant(cls, n):
        eye = np.eye(n)
        return cls(eye, eye)

    @classmethod
    def from_model(cls, model):
        return cls(model.generators, model.facets)


@dataclass(frozen=True, eq=False)
class LPProblem:
    A: np.ndarray
    b: np.ndarray
    blocks: tuple

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        blocks = tuple(self.blocks)
        if A.size == 0:
            A = A.reshape(b.shape[0], sum(bl.size for bl in blocks))
        if A.shape[0] != b.shape[0]:
            raise DimensionError(f"A has {A.shape[0]} rows but b has "
                                 f"{b.shape[0]} entries")
        if A.shape[1] != sum(bl.size for bl in blocks):
            raise DimensionError("block sizes do not add up to the number "
                                 "of columns of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "blocks", blocks)

    def column_slices(self):
        out, start = [], 0
        for bl in self.blocks:
            out.append(slice(start, start + bl.size))
            start += bl.size
        return out


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    """Outcome of :func:`solve_feasibility`.

    ``point`` is set for feasible problems, ``certificate`` (a multiplier
    for the equality rows, normalised to max-abs 1) for infeasible ones.
    """

    feasible: bool
    point: np.ndarray = None
    certificate: np.ndarray = None
    iterations: int = 0
    backend: str = field(default="", compare=False)

    @property
    def status(self):
        return "feasible" if self.feasible else "infeasible"

    def block_values(self, problem):
        return [self.point[s] for s in problem.column_slices()]


def standard_form(problem):
    """Constraint matrix over the generator weights of every block."""
    cols = []
    for bl, sl in zip(problem.blocks, problem.column_slices()):
        cols.append(problem.A[:, sl] @ bl.generators.T)
    if not cols:
        return np.zeros((problem.A.shape[0], 0))
    return np.hstack(cols)


def phase1_tableau(M, b):
    """Phase-1 tableau for M lam = b, lam >= 0, with one artificial per row.

    Returns ``(T, basis, signs)``; row signs make the right-hand side
    nonnegative.
    """
    p, N = M.shape
    signs = np.where(b < 0, -1.0, 1.0)
    T = np.zeros((p + 1, N + p + 1))
    T[:p, :N] = signs[:, None] * M
    T[:p, N:N + p] = np.eye(p)
    T[:p, -1] = np.abs(b)
    T[p, :N] = -T[:p, :N].sum(axis=0)
    T[p, -1] = -T[:p, -1].sum()
    return T, np.arange(N, N + p, dtype=np.int64), signs


def solve_feasibility(problem, pivot_tol=PIVOT_TOL, max_iter=100000):
    """Decide feasibility of ``problem``.

    Deterministic: the same problem always takes the same pivots.
    """
    A, b = problem.A, problem.b
    p = A.shape[0]
    M = standard_form(problem)
    N = M.shape[1]
    if p == 0:
        return FeasibilityResult(True, point=np.zeros(A.shape[1]),
                                 backend=_kernels.backend_name())
    T, basis, signs = phase1_tableau(M, b)

    status, iters = _kernels.phase1(T, basis, pivot_tol, max_iter)
    if status != _kernels.STATUS_OPTIMAL:
        raise RuntimeError("simplex hit the iteration limit")
    backend = _kernels.backend_name()

    residual = -T[p, -1]
    scale = max(1.0, float(np.max(np.abs(b))))
    if residual > INFEASIBLE_TOL * scale:
        y = 1.0 - T[p, N:N + p]
        cert = -signs * y
        cert = cert / np.max(np.abs(cert)) + 0.0
        return FeasibilityResult(False, certificate=cert, iterations=int(iters),
                                 backend=backend)

    lam = np.zeros(N)
    for i, j in enumerate(basis):
        if j < N:
            lam[j] = max(T[i, -1], 0.0)
    point = np.empty(A.shape[1])
    start = 0
    for bl, sl in zip(problem.blocks, problem.column_slices()):
        m = bl.generators.shape[0]
        point[sl] = bl.generators.T @ lam[start:start + m]
        start += m
    return FeasibilityResult(True, point=point, iterations=int(iters),
                             backend=backend)


def rationalize(x, max_denominator=MAX_DENOMINATOR):
    """Nearest fraction with bounded denominator, elementwise over lists."""
    if np.ndim(x) == 0:
        return Fraction(float(x)).limit_denominator(max_denominator)
    return [rationalize(v, max_denominator) for v in x]


def _dot(u, v):
    return sum((a * c for a, c in zip(u, v)), Fraction(0))


def verify_certificate(problem, result):
    """Re-check ``result`` for ``problem`` in exact rational arithmetic.

    All inputs are first rounded to fractions with denominator <= 10**6.
    Feasible results must satisfy the equalities and every facet inequality
    to within 1e-7; Farkas certificates must be exactly nonnegative on every
    block generator with ``b @ y < -1e-9``.
    """
    A = rationalize(problem.A)
    b = rationalize(problem.b)
    slices = problem.column_slices()
    if result.feasible:
        if result.point is None or len(result.point) != problem.A.shape[1]:
            return False
        x = rationalize(result.point)
        for row, bi in zip(A, b):
            if abs(_dot(row, x) - bi) > POINT_TOL:
                return False
        for bl, sl in zip(problem.blocks, slices):
            xs = x[sl]
            for f in rationalize(bl.facets):
                if _dot(f, xs) < -POINT_TOL:
                    return False
        return True

    if result.certificate is None or len(result.certificate) != len(b):
        return False
    y = rationalize(result.certificate)
    if _dot(b, y) >= -CERT_MARGIN:
        return False
    cols = list(zip(*A)) if A else []
    for bl, sl in zip(problem.blocks, slices):
        r = [_dot(col, y) for col in cols[sl]]
        for g in rationalize(bl.generators):
            if _dot(r, g) < 0:
                return False
    return True
