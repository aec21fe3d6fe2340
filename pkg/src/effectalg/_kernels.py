"""Dense Bland-rule simplex kernels.

Two interchangeable implementations of the phase-1 pivot loop live here: a
numba ``@njit`` version and a vectorised numpy version. ``phase1`` dispatches
to one of them. The numba path is used when numba imports cleanly, unless the
environment variable ``EFFECTALG_NUMBA`` is set to ``0``/``false``/``no``.

Tableau layout (both kernels operate in place)::

    T[:m, :n]   constraint columns (structural + artificial)
    T[:m, n]    right-hand side (kept >= 0)
    T[m, :n]    reduced costs
    T[m, n]     minus the current objective value

``basis[i]`` is the column index basic in row ``i``.
"""
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

STATUS_OPTIMAL = 0
STATUS_ITERATION_LIMIT = 1

_RATIO_EPS = 1e-12


def _numba_requested():
    flag = os.environ.get("EFFECTALG_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


def phase1_numpy(T, basis, pivot_tol, max_iter):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    it = 0
    while it < max_iter:
        enter = -1
        for j in range(n):
            if T[m, j] < -pivot_tol:
                enter = j
                break
        if enter < 0:
            return STATUS_OPTIMAL, it
        col = T[:m, enter]
        cand = np.nonzero(col > pivot_tol)[0]
        if cand.size == 0:
            # cannot happen in phase 1 (objective bounded below by 0)
            return STATUS_OPTIMAL, it
        ratios = T[cand, n] / col[cand]
        best = ratios.min()
        ties = cand[ratios <= best + _RATIO_EPS]
        leave = ties[np.argmin(basis[ties])]
        _pivot_numpy(T, leave, enter)
        basis[leave] = enter
        it += 1
    return STATUS_ITERATION_LIMIT, it


def _pivot_numpy(T, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _phase1_loops(T, basis, pivot_tol, max_iter):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    it = 0
    while it < max_iter:
        enter = -1
        for j in range(n):
            if T[m, j] < -pivot_tol:
                enter = j
                break
        if enter < 0:
            return STATUS_OPTIMAL, it
        found = False
        best = 0.0
        for i in range(m):
            a = T[i, enter]
            if a > pivot_tol:
                ratio = T[i, n] / a
                if not found or ratio < best:
                    best = ratio
                    found = True
        if not found:
            return STATUS_OPTIMAL, it
        leave = -1
        for i in range(m):
            a = T[i, enter]
            if a > pivot_tol and T[i, n] / a <= best + _RATIO_EPS:
                if leave < 0 or basis[i] < basis[leave]:
                    leave = i
        piv = T[leave, enter]
        for l in range(n + 1):
            T[leave, l] = T[leave, l] / piv
        for k in range(m + 1):
            if k != leave:
                f = T[k, enter]
                if f != 0.0:
                    for l in range(n + 1):
                        T[k, l] = T[k, l] - f * T[leave, l]
        basis[leave] = enter
        it += 1
    return STATUS_ITERATION_LIMIT, it


try:
    import numba

    phase1_numba = numba.njit(cache=True)(_phase1_loops)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    phase1_numba = None
    HAVE_NUMBA = False
    logger.warning("numba unavailable; simplex runs on the numpy kernel")


USE_NUMBA = HAVE_NUMBA and _numba_requested()


def phase1(T, basis, pivot_tol=1e-10, max_iter=100000):
    """Run Bland's rule on tableau ``T`` until no reduced cost is negative.

    Returns ``(status, iterations)``; ``T`` and ``basis`` are updated in place.
    """
    if USE_NUMBA:
        return phase1_numba(T, basis, pivot_tol, max_iter)
    return phase1_numpy(T, basis, pivot_tol, max_iter)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
