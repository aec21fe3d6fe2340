"""Finite-dimensional quantum backend on the PSD cone.

Effects are Hermitian matrices between 0 and I, states are density
matrices, and operations come from Kraus lists ``rho -> sum K rho K*``.
All arithmetic here is complex; conversion to the real coordinates of
:class:`~effectalg.cone.ConeModel` happens only at the boundary.
"""
from dataclasses import dataclass

import numpy as np

from ._linalg import matrix_sqrt
from .cone import MAX_HILBERT_DIM, PSD, ConeModel, Effect
from .errors import DimensionError, InvariantError, UnsupportedModelError
from .instruments import Instrument
from .observables import Observable
from .operations import Operation
from .states import State, SubState

__all__ = [
    "DensityState",
    "HilbertModel",
    "KrausOperation",
    "born_state",
    "complex_from_json",
    "complex_to_json",
    "kraus_to_operation",
    "luders_instrument",
    "matrix_sqrt",
]


class HilbertModel:
    """The effect algebra of an n-level system (n >= 2)."""

    def __init__(self, n, tol=1e-9):
        if int(n) != n or n < 2:
            raise InvariantError("Hilbert dimension must be an integer >= 2")
        if n > MAX_HILBERT_DIM:
            raise UnsupportedModelError(f"Hilbert dimension capped at "
                                        f"{MAX_HILBERT_DIM}")
        self.n = int(n)
        self.model = ConeModel.psd(self.n, tol=tol)

    def effect(self, matrix):
        return Effect(self.model, self.model.to_coords(_square(matrix,
                                                              self.n)))

    def state(self, rho):
        return born_state(rho, self.model)

    def matrix(self, x):
        """Matrix of an effect, a (sub)state or a coordinate vector."""
        if isinstance(x, Effect):
            x = x.vector
        elif isinstance(x, SubState):
            x = x.covector
        return self.model.to_matrix(x)

    def basis_projector(self, k):
        p = np.zeros((self.n, self.n), dtype=complex)
        p[k, k] = 1.0
        return p

    def __repr__(self):
        return f"HilbertModel({self.n})"


def _square(m, n=None):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionError(f"expected {n}x{n}, got {m.shape[0]}x"
                             f"{m.shape[1]}")
    return m


def _model_for(n, model):
    if model is None:
        return ConeModel.psd(n)
    if model.kind != PSD or model.hilbert_dim != n:
        raise DimensionError(f"model does not hold {n}x{n} matrices")
    return model


@dataclass(frozen=True, eq=False)
class DensityState:
    """A density matrix: Hermitian, PSD up to tol, unit trace."""

    rho: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        rho = _square(self.rho)
        if np.max(np.abs(rho - rho.conj().T)) > self.tol:
            raise InvariantError("density matrix is not Hermitian")
        w = np.linalg.eigvalsh(rho)
        if w[0] < -self.tol:
            raise InvariantError(f"density matrix has eigenvalue {w[0]:.3g}")
        if abs(np.trace(rho).real - 1.0) > self.tol:
            raise InvariantError("density matrix does not have trace 1")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)


def born_state(rho, model=None):
    """The state s(a) = tr(rho a).

    With the trace-orthonormal coordinates the covector is just the
    coordinate vector of rho.
    """
    if isinstance(rho, DensityState):
        rho = rho.rho
    d = DensityState(rho)
    model = _model_for(d.rho.shape[0], model)
    return State(model, model.to_coords(d.rho))


@dataclass(frozen=True, eq=False)
class KrausOperation:
    """Kraus list with sum K*K <= I."""

    kraus: tuple
    tol: float = 1e-9

    def __post_init__(self):
        ks = tuple(_square(k) for k in self.kraus)
        if not ks:
            raise InvariantError("need at least one Kraus operator")
        n = ks[0].shape[0]
        for k in ks:
            _square(k, n)
        total = sum(k.conj().T @ k for k in ks)
        w = np.linalg.eigvalsh(np.eye(n) - total)
        if w[0] < -self.tol:
            raise InvariantError("Kraus operators violate sum K*K <= I "
                                 f"(excess {-w[0]:.3g})")
        object.__setattr__(self, "kraus", ks)

    @property
    def n(self):
        return self.kraus[0].shape[0]

    def apply_matrix(self, rho):
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def dual_matrix(self, b):
        return sum(k.conj().T @ b @ k for k in self.kraus)

    def to_dict(self):
        return {"type": "kraus",
                "matrices": [complex_to_json(k) for k in self.kraus]}


def kraus_to_operation(k, model=None):
    """Operation with dual b -> sum K* b K, in real coordinates.

    Column j of the dual matrix holds the coordinates of sum K* B_j K for
    the j-th Hermitian basis element B_j. Positivity holds by construction,
    so no probe check is run.
    """
    if not isinstance(k, KrausOperation):
        k = KrausOperation(tuple(k))
    model = _model_for(k.n, model)
    basis = model._basis
    D = np.array([model.to_coords(k.dual_matrix(B)) for B in basis]).T
    return Operation(model, model, D, check_positivity=False)


def luders_instrument(A):
    """Instrument x -> (rho -> A_x^(1/2) rho A_x^(1/2)), which measures A."""
    model = A.model
    if model.kind != PSD:
        raise UnsupportedModelError("Lüders instruments need a psd model")
    ops = []
    for v in A.vectors:
        r = matrix_sqrt(model.to_matrix(v), model.tol)
        ops.append(kraus_to_operation(KrausOperation((r,)), model))
    return Instrument(ops, A.outcomes)


def povm(model, matrices, outcomes=None):
    """Observable from a list of effect matrices."""
    return Observable(model, [model.to_coords(_square(m, model.hilbert_dim))
                              for m in matrices], outcomes)


def complex_to_json(m):
    """Nested lists with every entry as a [re, im] pair."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def complex_from_json(data):
    a = np.asarray(data, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise DimensionError("complex matrix must be rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def effect_matrix(a):
    """Matrix form of an effect on a psd model."""
    return a.model.to_matrix(a.vector)
