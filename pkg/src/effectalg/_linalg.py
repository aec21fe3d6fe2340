import numpy as np

from .errors import InvariantError

HERMITIAN_TOL = 1e-9


def matrix_sqrt(a, tol=1e-9):
    """Principal square root of a PSD matrix via eigendecomposition.

    Eigenvalues in [-tol, 0) are clamped to zero; anything more negative is
    rejected, as is a non-Hermitian input.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError("matrix_sqrt needs a square matrix")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise InvariantError("matrix_sqrt needs a Hermitian matrix")
    w, v = np.linalg.eigh(a)
    if w.size and w[0] < -tol:
        raise InvariantError(f"matrix is not PSD (eigenvalue {w[0]:.3g})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def commute(a, b, tol=1e-9):
    return float(np.max(np.abs(a @ b - b @ a))) <= tol
