"""Finite-dimensional ordered linear spaces and their order intervals.

A :class:`ConeModel` is a pair (V, K) with V = R^dim and a positive cone K,
together with an order unit ``u``. Two cone backends exist:

* ``polyhedral`` -- K is given by both a V-representation (generators, one
  per row) and an H-representation (facets, one per row; x in K iff
  ``facets @ x >= 0``);
* ``psd`` -- K is the cone of positive semidefinite n x n Hermitian
  matrices, realified into R^(n*n) through an orthonormal basis for the
  trace inner product ``<A, B> = tr(AB)``.

Vectors of V (``ConeVector`` in the docs) are plain 1-d float arrays.
Effects are members of the interval [theta, u] and are wrapped in
:class:`Effect`, which validates on construction.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionError,
    InvariantError,
    ModelMismatchError,
    UndefinedSumError,
    UnsupportedModelError,
)

DEFAULT_TOL = 1e-9
RAY_DEDUP_TOL = 1e-7
MAX_HILBERT_DIM = 8

POLYHEDRAL = "polyhedral"
PSD = "psd"


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def hermitian_basis(n):
    """Orthonormal basis of the n x n Hermitian matrices, shape (n*n, n, n).

    Order: the n diagonal units, then for each pair j < k the symmetric
    element (E_jk + E_kj)/sqrt(2), then for each pair the antisymmetric
    element i(E_kj - E_jk)/sqrt(2).
    """
    basis = []
    for j in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    pairs = list(itertools.combinations(range(n), 2))
    s = 1.0 / np.sqrt(2.0)
    for j, k in pairs:
        e = np.zeros((n, n), dtype=complex)
        e[j, k] = e[k, j] = s
        basis.append(e)
    for j, k in pairs:
        e = np.zeros((n, n), dtype=complex)
        e[j, k] = -1j * s
        e[k, j] = 1j * s
        basis.append(e)
    return np.array(basis)


def extreme_rays(H, tol=RAY_DEDUP_TOL):
    """Extreme rays of the pointed cone {x : H @ x >= 0}.

    Enumerates every choice of ``d - 1`` constraint rows, keeps the
    one-dimensional solutions that satisfy all constraints and removes
    duplicates. Rays are returned with unit Euclidean norm, in the order
    they are first found. Desk-scale only: cost is C(rows, d-1) SVDs.
    """
    H = np.asarray(H, dtype=float)
    k, d = H.shape
    if d == 1:
        rays = [r for r in (np.ones(1), -np.ones(1)) if np.all(H @ r >= -tol)]
        return np.array(rays).reshape(-1, 1)
    scale = np.linalg.norm(H, axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    Hn = H / scale
    rays = []
    for rows in itertools.combinations(range(k), d - 1):
        sub = Hn[list(rows)]
        _, sv, vt = np.linalg.svd(sub)
        if sv.size < d - 1 or sv[-1] < 1e-10:
            continue
        r = vt[-1]
        vals = Hn @ r
        if np.all(vals >= -tol):
            pass
        elif np.all(vals <= tol):
            r = -r
        else:
            continue
        if not any(np.max(np.abs(r - q)) <= tol for q in rays):
            rays.append(r)
    return np.array(rays).reshape(-1, d)


class ConeModel:
    """Ordered linear space (R^dim, K) with order unit and order tolerance.

    Build instances with :meth:`polyhedral`, :meth:`from_generators` or
    :meth:`psd` (or the presets :func:`orthant`, :func:`gbit`). All
    invariants are checked eagerly and instances are immutable.
    """

    def __init__(self, kind, dim, unit, generators=None, facets=None,
                 hilbert_dim=None, tol=DEFAULT_TOL, name=None):
        if kind not in (POLYHEDRAL, PSD):
            raise InvariantError(f"unknown cone kind {kind!r}")
        if tol < 0:
            raise InvariantError("tolerance must be nonnegative")
        self.kind = kind
        self.dim = int(dim)
        self.tol = float(tol)
        self.name = name
        self.unit = _frozen(unit)
        self.hilbert_dim = hilbert_dim
        self.generators = None if generators is None else _frozen(generators)
        self.facets = None if facets is None else _frozen(facets)
        if kind == PSD:
            self._basis = hermitian_basis(hilbert_dim)
            self._basis.setflags(write=False)
        self._validate()

    # -- constructors -------------------------------------------------
    @classmethod
    def polyhedral(cls, generators, facets, unit, tol=DEFAULT_TOL, name=None):
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        F = np.atleast_2d(np.asarray(facets, dtype=float))
        return cls(POLYHEDRAL, G.shape[1], unit, generators=G, facets=F,
                   tol=tol, name=name)

    @classmethod
    def from_generators(cls, generators, unit, tol=DEFAULT_TOL, name=None):
        """Polyhedral model whose facets are computed from the generators."""
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        F = extreme_rays(G)
        return cls.polyhedral(G, F, unit, tol=tol, name=name)

    @classmethod
    def psd(cls, n, tol=DEFAULT_TOL, max_hilbert_dim=MAX_HILBERT_DIM):
        n = int(n)
        if n < 2:
            raise InvariantError("Hilbert dimension must be at least 2")
        if n > max_hilbert_dim:
            raise InvariantError(
                f"Hilbert dimension {n} exceeds cap {max_hilbert_dim}")
        unit = np.concatenate([np.ones(n), np.zeros(n * n - n)])
        return cls(PSD, n * n, unit, hilbert_dim=n, tol=tol, name=f"psd{n}")

    def with_tol(self, tol):
        if self.kind == PSD:
            return ConeModel.psd(self.hilbert_dim, tol=tol)
        return ConeModel.polyhedral(self.generators, self.facets, self.unit,
                                    tol=tol, name=self.name)

    # -- validation ---------------------------------------------------
    def _validate(self):
        if self.dim < 1:
            raise InvariantError("dimension must be positive")
        if self.unit.shape != (self.dim,):
            raise DimensionError(
                f"unit has shape {self.unit.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(self.unit)):
            raise InvariantError("unit has non-finite coordinates")
        if np.max(np.abs(self.unit)) <= self.tol:
            raise InvariantError("order unit must differ from theta")
        if self.kind == PSD:
            if self.dim != self.hilbert_dim ** 2:
                raise InvariantError("psd model must have dim = n^2")
            if self.min_value(self.unit) <= self.tol:
                raise InvariantError("psd unit must be positive definite")
            return
        G, F = self.generators, self.facets
        if G is None or F is None:
            raise InvariantError("polyhedral model needs generators and facets")
        if G.ndim != 2 or G.shape[1] != self.dim or F.ndim != 2 \
                or F.shape[1] != self.dim:
            raise DimensionError("generators/facets must have dim columns")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(F))):
            raise InvariantError("non-finite generator or facet data")
        if np.linalg.matrix_rank(F) < self.dim:
            raise InvariantError("cone is not pointed: K meets -K beyond theta")
        if np.linalg.matrix_rank(G) < self.dim:
            raise InvariantError("generators do not span V; [theta,u] does "
                                 "not generate V")
        Fn, Gn = self._facets_unit, self._generators_unit
        if np.min(Fn @ Gn.T) < -self.tol:
            raise InvariantError("a generator violates a facet inequality")
        for i, f in enumerate(Fn if self.dim > 1 else []):
            tight = Gn[np.abs(Gn @ f) <= max(self.tol, 1e-9) * 10]
            if tight.shape[0] == 0 or \
                    np.linalg.matrix_rank(tight, tol=1e-8) < self.dim - 1:
                raise InvariantError(f"facet {i} is not a facet of cone(G)")
        for r in extreme_rays(F):
            cos = Gn @ r
            if not np.any(np.abs(cos - 1.0) <= 1e-7):
                raise InvariantError("facet cone has an extreme ray that is "
                                     "not among the generators")
        if np.min(Fn @ self.unit) <= self.tol:
            raise InvariantError("unit is not an order unit (lies on the "
                                 "boundary of K)")

    @cached_property
    def _facets_unit(self):
        F = np.asarray(self.facets)
        return F / np.linalg.norm(F, axis=1, keepdims=True)

    @cached_property
    def _generators_unit(self):
        G = np.asarray(self.generators)
        return G / np.linalg.norm(G, axis=1, keepdims=True)

    # -- coordinates --------------------------------------------------
    def vector(self, x):
        """Validate and return ``x`` as a float coordinate vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(
                f"vector has shape {x.shape}, expected ({self.dim},)")
        return x

    def to_matrix(self, x):
        """Hermitian matrix encoded by coordinates ``x`` (psd only)."""
        self._need_psd()
        x = self.vector(x)
        return np.tensordot(x, self._basis, axes=1)

    def to_coords(self, H):
        """Real coordinates of Hermitian matrix ``H`` (psd only)."""
        self._need_psd()
        H = np.asarray(H, dtype=complex)
        n = self.hilbert_dim
        if H.shape != (n, n):
            raise DimensionError(f"matrix has shape {H.shape}, expected "
                                 f"({n}, {n})")
        return np.real(np.einsum("kij,ji->k", self._basis, H))

    def _need_psd(self):
        if self.kind != PSD:
            raise UnsupportedModelError("matrix view exists only for psd "
                                        "models")

    @property
    def theta(self):
        return np.zeros(self.dim)

    # -- order --------------------------------------------------------
    def min_value(self, x):
        """Signed distance-like margin of ``x`` to the boundary of K.

        Polyhedral: smallest normalised facet value. PSD: smallest eigenvalue.
        """
        x = self.vector(x)
        if self.kind == PSD:
            return float(np.linalg.eigvalsh(self.to_matrix(x))[0])
        return float(np.min(self._facets_unit @ x))

    def contains(self, x):
        return self.min_value(x) >= -self.tol

    def dual_min_value(self, s):
        """Smallest value of covector ``s`` on unit-normalised cone generators.

        Nonnegative iff ``s`` is positive on K (PSD cone is self-dual in
        these coordinates).
        """
        s = self.vector(s)
        if self.kind == PSD:
            return self.min_value(s)
        return float(np.min(self._generators_unit @ s))

    def dual_contains(self, s):
        return self.dual_min_value(s) >= -self.tol

    def probe_generators(self, count=100, seed=0):
        """Finite list of cone vectors used for positivity spot checks.

        Polyhedral: the generators. PSD: the diagonal projectors, the
        projectors onto (e_j + e_k)/sqrt2 and (e_j + i e_k)/sqrt2, and
        ``count`` seeded random pure-state projectors.
        """
        if self.kind == POLYHEDRAL:
            return np.array(self.generators)
        n = self.hilbert_dim
        vecs = [np.eye(n)[j] for j in range(n)]
        s = 1.0 / np.sqrt(2.0)
        for j, k in itertools.combinations(range(n), 2):
            e = np.zeros(n, dtype=complex)
            e[j], e[k] = s, s
            vecs.append(e)
            e = np.zeros(n, dtype=complex)
            e[j], e[k] = s, 1j * s
            vecs.append(e)
        rng = np.random.default_rng(seed)
        for _ in range(count):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            vecs.append(v / np.linalg.norm(v))
        return np.array([self.to_coords(np.outer(v, v.conj())) for v in vecs])

    def order_unit_norm(self, x):
        """Smallest t >= 0 with -t u <= x <= t u."""
        x = self.vector(x)
        if self.kind == PSD:
            return float(np.max(np.abs(np.linalg.eigvalsh(self.to_matrix(x)))))
        Fn = self._facets_unit
        fu = Fn @ self.unit
        return float(max(np.max(np.abs(Fn @ x) / fu), 0.0))

    # -- identity / serialisation -------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ConeModel):
            return NotImplemented
        if (self.kind, self.dim) != (other.kind, other.dim):
            return False
        if self.kind == PSD:
            return self.hilbert_dim == other.hilbert_dim
        return (np.array_equal(self.generators, other.generators)
                and np.array_equal(self.facets, other.facets)
                and np.array_equal(self.unit, other.unit))

    def __hash__(self):
        return hash((self.kind, self.dim))

    def __repr__(self):
        if self.kind == PSD:
            return f"ConeModel.psd({self.hilbert_dim})"
        label = f" {self.name!r}" if self.name else ""
        return (f"<ConeModel polyhedral{label} dim={self.dim} "
                f"generators={len(self.generators)} "
                f"facets={len(self.facets)}>")

    def to_dict(self):
        if self.kind == PSD:
            return {"kind": "psd", "hilbert_dim": self.hilbert_dim}
        return {"kind": "polyhedral",
                "generators": self.generators.tolist(),
                "facets": self.facets.tolist(),
                "unit": self.unit.tolist()}

    @classmethod
    def from_dict(cls, data, tol=DEFAULT_TOL):
        data = dict(data)
        kind = data.pop("kind", None)
        if kind == "psd":
            n = data.pop("hilbert_dim")
            _reject_extra(data, "psd model")
            return cls.psd(n, tol=tol)
        if kind == "polyhedral":
            G = data.pop("generators")
            F = data.pop("facets")
            u = data.pop("unit")
            _reject_extra(data, "polyhedral model")
            return cls.polyhedral(G, F, u, tol=tol)
        raise InvariantError(f"unknown model kind {kind!r}")


def _reject_extra(data, what):
    if data:
        raise InvariantError(f"unknown fields in {what}: {sorted(data)}")


def same_model(m1, m2):
    if m1 != m2:
        raise ModelMismatchError(f"{m1!r} and {m2!r} are different models")


# -- presets ----------------------------------------------------------
def orthant(n, tol=DEFAULT_TOL):
    """Classical n-outcome model: K = R^n_+ with u = (1, ..., 1)."""
    eye = np.eye(n)
    return ConeModel.polyhedral(eye, eye, np.ones(n), tol=tol,
                                name=f"orthant{n}")


def gbit(tol=DEFAULT_TOL):
    """Square-state-space model ("gbit") on R^3 with u = (1, 0, 0).

    Effects are a0 + a1 x + a2 y pairings; the cone has four extreme rays
    (1, +-1, 0), (1, 0, +-1) and four facets a0 +- a1 +- a2 >= 0.
    """
    G = [[1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1]]
    F = [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]]
    return ConeModel.polyhedral(G, F, [1, 0, 0], tol=tol, name="gbit")


# -- order operations -------------------------------------------------
def cone_contains(model, x):
    """True iff ``x`` lies in K up to the model tolerance."""
    return model.contains(x)


def leq(model, x, y):
    """x <= y in the cone order, i.e. y - x in K."""
    return model.contains(model.vector(y) - model.vector(x))


@dataclass(frozen=True, eq=False)
class Effect:
    """A vector of the order interval [theta, u] of ``model``."""

    model: ConeModel
    vector: np.ndarray

    def __post_init__(self):
        v = _frozen(self.model.vector(self.vector))
        object.__setattr__(self, "vector", v)
        m = self.model
        if m.min_value(v) < -m.tol:
            raise InvariantError(f"effect {v.tolist()} is not in the cone")
        if m.min_value(m.unit - v) < -m.tol:
            raise InvariantError(f"effect {v.tolist()} is not below the unit")

    def __eq__(self, other):
        if not isinstance(other, Effect):
            return NotImplemented
        return self.model == other.model and \
            np.array_equal(self.vector, other.vector)

    __hash__ = None

    def close_to(self, other, tol=None):
        same_model(self.model, other.model)
        tol = self.model.tol if tol is None else tol
        return float(np.max(np.abs(self.vector - other.vector))) <= tol

    def __repr__(self):
        return f"Effect({np.array2string(self.vector, precision=6)})"


def effect(model, coords):
    return Effect(model, coords)


def theta(model):
    return Effect(model, np.zeros(model.dim))


def unit_effect(model):
    return Effect(model, model.unit)


def effect_perp(a, b):
    same_model(a.model, b.model)
    return leq(a.model, a.vector + b.vector, a.model.unit)


def effect_add(a, b):
    """Partial sum a + b; defined only when a is orthogonal to b."""
    if not effect_perp(a, b):
        raise UndefinedSumError("a + b is undefined: a and b are not "
                                "orthogonal (a + b exceeds u)")
    return Effect(a.model, a.vector + b.vector)


def effect_scale(lam, a):
    if not 0.0 <= lam <= 1.0:
        raise InvariantError(f"scale factor {lam} outside [0, 1]")
    return Effect(a.model, lam * a.vector)


def complement(a):
    """The effect u - a."""
    return Effect(a.model, a.model.unit - a.vector)
