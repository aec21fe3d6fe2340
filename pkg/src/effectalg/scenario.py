"""JSON scenario files: named models, effects, states, observables,
operations and instruments plus a list of check directives.

Top-level layout (``"version": "1"``; unknown fields are rejected)::

    {"version": "1",
     "models": {"m": {"type": "orthant", "n": 2}},
     "effects": {"a": {"model": "m", "vector": [1, 0.3]}},
     "states": {"s": {"model": "m", "covector": [1, 0]}},
     "observables": {"A": {"model": "m", "outcomes": ["x1", "x2"],
                           "effects": ["a", [0, 0.7]]}},
     "operations": {"H": {"type": "pure_holevo", "effect": "a",
                          "state": "s"}},
     "instruments": {"I": {"type": "holevo", "observable": "A",
                           "states": ["s", "s"]}},
     "checks": [{"command": "repeatable", "effect": "a",
                 "expect": "REPEATABLE"}]}

Objects are built lazily on first reference. Structural problems raise
:class:`ScenarioError`; objects whose data violate a type invariant are
recorded and re-raised as :class:`InvariantError` on access.
"""
import json

import numpy as np

from .cone import ConeModel, Effect, gbit, orthant
from .errors import EffectAlgebraError, InvariantError, ScenarioError
from .hilbert import KrausOperation, complex_from_json, kraus_to_operation
from .hilbert import luders_instrument
from .holevo import mixed_holevo, pure_holevo, pure_holevo_instrument
from .instruments import Instrument
from .observables import Observable
from .operations import Operation, constant_channel, identity_operation
from .states import State

VERSION = "1"
SECTIONS = ("models", "effects", "states", "observables", "operations",
            "instruments")
TOP_FIELDS = {"version", "description", "checks", *SECTIONS}

_MODEL_FIELDS = {
    "orthant": {"type", "n"},
    "gbit": {"type"},
    "qubit": {"type"},
    "hilbert": {"type", "n"},
    "polyhedral": {"type", "generators", "facets", "unit"},
}
_OP_FIELDS = {
    "matrix": {"type", "source", "target", "dual_matrix"},
    "identity": {"type", "model"},
    "constant": {"type", "source", "state"},
    "pure_holevo": {"type", "effect", "state"},
    "mixed_holevo": {"type", "terms"},
    "kraus": {"type", "model", "matrices"},
}
_INSTR_FIELDS = {
    "operations": {"type", "outcomes", "operations"},
    "holevo": {"type", "observable", "states"},
    "luders": {"type", "observable"},
}
CHECK_FIELDS = {
    "validate": set(),
    "coexist": {"a", "b"},
    "repeatable": {"effect", "op"},
    "seqprod": {"obs", "instr", "then"},
    "condition": {"obs", "instr", "then"},
    "commutant": {"state", "a", "b"},
    "compose": {"i", "j"},
}
CHECK_REQUIRED = {
    "validate": set(),
    "coexist": {"a", "b"},
    "repeatable": {"effect"},
    "seqprod": {"obs", "instr", "then"},
    "condition": {"obs", "instr", "then"},
    "commutant": {"state", "a", "b"},
    "compose": {"i", "j"},
}


def _fields(d, allowed, where, required=None):
    if not isinstance(d, dict):
        raise ScenarioError(f"{where}: expected an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ScenarioError(f"{where}: unknown field(s) "
                            f"{', '.join(sorted(extra))}")
    missing = set(allowed if required is None else required) - set(d)
    if missing:
        raise ScenarioError(f"{where}: missing field(s) "
                            f"{', '.join(sorted(missing))}")


def _array(x, where, ndim=None):
    try:
        a = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: expected numbers") from None
    if ndim is not None and a.ndim != ndim:
        raise ScenarioError(f"{where}: expected a {ndim}-d array")
    if not np.all(np.isfinite(a)):
        raise ScenarioError(f"{where}: non-finite number")
    return a


def _complex(x, where):
    try:
        return complex_from_json(x)
    except (EffectAlgebraError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


class Scenario:
    """Parsed scenario with lazily constructed, cached objects."""

    def __init__(self, data, tol=None, source="<scenario>"):
        self.source = source
        self.tol = tol
        _fields(data, TOP_FIELDS, "scenario", required={"version"})
        if data["version"] != VERSION:
            raise ScenarioError(f"unsupported scenario version "
                                f"{data['version']!r}")
        self.raw = {s: data.get(s, {}) for s in SECTIONS}
        for s in SECTIONS:
            if not isinstance(self.raw[s], dict):
                raise ScenarioError(f"{s}: expected an object of named "
                                    "entries")
        names = {}
        for s in SECTIONS:
            for n in self.raw[s]:
                if n in names:
                    raise ScenarioError(f"name {n!r} used in both "
                                        f"{names[n]} and {s}")
                names[n] = s
        self.checks = data.get("checks", [])
        if not isinstance(self.checks, list):
            raise ScenarioError("checks: expected a list")
        for k, c in enumerate(self.checks):
            where = f"checks[{k}]"
            if not isinstance(c, dict) or c.get("command") not in CHECK_FIELDS:
                raise ScenarioError(f"{where}: unknown or missing command")
            cmd = c["command"]
            _fields(c, {"command", "expect", *CHECK_FIELDS[cmd]}, where,
                    required={"command", *CHECK_REQUIRED[cmd]})
        self._cache = {}
        self._errors = {}
        self._building = set()

    @classmethod
    def load(cls, path, tol=None):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ScenarioError(f"cannot read {path}: {exc.strerror}") \
                from None
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON ({exc.msg} at line "
                                f"{exc.lineno})") from None
        return cls(data, tol=tol, source=str(path))

    # -- lookup -------------------------------------------------------
    def names(self, section):
        return list(self.raw[section])

    def get(self, section, name):
        if not isinstance(name, str) or name not in self.raw[section]:
            raise ScenarioError(f"unknown {section[:-1]} {name!r}")
        key = (section, name)
        if key in self._cache:
            return self._cache[key]
        if key in self._errors:
            raise InvariantError(self._errors[key])
        if key in self._building:
            raise ScenarioError(f"{section[:-1]} {name!r} refers to itself")
        self._building.add(key)
        try:
            obj = getattr(self, "_build_" + section)(name, self.raw[section][name])
        except InvariantError as exc:
            self._errors[key] = f"{section[:-1]} {name!r}: {exc}"
            raise InvariantError(self._errors[key]) from None
        except EffectAlgebraError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{section[:-1]} {name!r}: {exc}") from None
        finally:
            self._building.discard(key)
        self._cache[key] = obj
        return obj

    def model(self, name):
        return self.get("models", name)

    def effect(self, name):
        return self.get("effects", name)

    def state(self, name):
        return self.get("states", name)

    def observable(self, name):
        return self.get("observables", name)

    def operation(self, name):
        return self.get("operations", name)

    def instrument(self, name):
        return self.get("instruments", name)

    def validate_all(self):
        """Build every object; return ``[(section, name, error or None)]``."""
        out = []
        for s in SECTIONS:
            for n in self.raw[s]:
                try:
                    self.get(s, n)
                    out.append((s, n, None))
                except InvariantError as exc:
                    out.append((s, n, str(exc)))
        return out

    # -- builders -----------------------------------------------------
    def _kw(self):
        return {} if self.tol is None else {"tol": self.tol}

    def _build_models(self, name, d):
        where = f"model {name!r}"
        kind = d.get("type") if isinstance(d, dict) else None
        if kind not in _MODEL_FIELDS:
            raise ScenarioError(f"{where}: unknown model type {kind!r}")
        _fields(d, _MODEL_FIELDS[kind], where)
        if kind == "orthant":
            return orthant(_int(d["n"], where), **self._kw())
        if kind == "gbit":
            return gbit(**self._kw())
        if kind == "qubit":
            return ConeModel.psd(2, **self._kw())
        if kind == "hilbert":
            return ConeModel.psd(_int(d["n"], where), **self._kw())
        return ConeModel.polyhedral(_array(d["generators"], where, 2),
                                    _array(d["facets"], where, 2),
                                    _array(d["unit"], where, 1), **self._kw())

    def _vector(self, model, d, where, key):
        if key in d:
            return _array(d[key], where, 1)
        return model.to_coords(_complex(d["matrix"], where))

    def _build_effects(self, name, d):
        where = f"effect {name!r}"
        _fields(d, {"model", "vector", "matrix"}, where, required={"model"})
        if ("vector" in d) == ("matrix" in d):
            raise ScenarioError(f"{where}: give exactly one of vector, matrix")
        m = self.model(d["model"])
        return Effect(m, self._vector(m, d, where, "vector"))

    def _build_states(self, name, d):
        where = f"state {name!r}"
        _fields(d, {"model", "covector", "density"}, where,
                required={"model"})
        if ("covector" in d) == ("density" in d):
            raise ScenarioError(f"{where}: give exactly one of covector, "
                                "density")
        m = self.model(d["model"])
        if "covector" in d:
            return State(m, _array(d["covector"], where, 1))
        return State(m, m.to_coords(_complex(d["density"], where)))

    def _effect_ref(self, m, ref, where):
        if isinstance(ref, str):
            e = self.effect(ref)
            if e.model != m:
                raise ScenarioError(f"{where}: effect {ref!r} is on another "
                                    "model")
            return e.vector
        return _array(ref, where, 1)

    def _build_observables(self, name, d):
        where = f"observable {name!r}"
        _fields(d, {"model", "outcomes", "effects"}, where,
                required={"model", "effects"})
        m = self.model(d["model"])
        if not isinstance(d["effects"], list) or not d["effects"]:
            raise ScenarioError(f"{where}: effects must be a nonempty list")
        vecs = [self._effect_ref(m, e, where) for e in d["effects"]]
        return Observable(m, vecs, d.get("outcomes"))

    def _build_operations(self, name, d):
        where = f"operation {name!r}"
        kind = d.get("type") if isinstance(d, dict) else None
        if kind not in _OP_FIELDS:
            raise ScenarioError(f"{where}: unknown operation type {kind!r}")
        _fields(d, _OP_FIELDS[kind], where)
        if kind == "matrix":
            return Operation(self.model(d["source"]), self.model(d["target"]),
                             _array(d["dual_matrix"], where, 2))
        if kind == "identity":
            return identity_operation(self.model(d["model"]))
        if kind == "constant":
            return constant_channel(self.model(d["source"]),
                                    self.state(d["state"]))
        if kind == "pure_holevo":
            return pure_holevo(self.effect(d["effect"]), self.state(d["state"]))
        if kind == "mixed_holevo":
            terms = []
            for k, t in enumerate(d["terms"]):
                _fields(t, {"effect", "state"}, f"{where} term {k}")
                terms.append((self.effect(t["effect"]), self.state(t["state"])))
            return mixed_holevo(terms)
        m = self.model(d["model"])
        mats = tuple(_complex(k, where) for k in d["matrices"])
        return kraus_to_operation(KrausOperation(mats, tol=m.tol), m)

    def _build_instruments(self, name, d):
        where = f"instrument {name!r}"
        kind = d.get("type", "operations") if isinstance(d, dict) else None
        if kind not in _INSTR_FIELDS:
            raise ScenarioError(f"{where}: unknown instrument type {kind!r}")
        _fields(d, _INSTR_FIELDS[kind], where,
                required=_INSTR_FIELDS[kind] - {"type", "outcomes"})
        if kind == "operations":
            ops = [self.operation(o) for o in d["operations"]]
            return Instrument(ops, d.get("outcomes"))
        A = self.observable(d["observable"])
        if kind == "luders":
            return luders_instrument(A)
        return pure_holevo_instrument(A, [self.state(s) for s in d["states"]])


def _int(x, where):
    if not isinstance(x, int) or isinstance(x, bool):
        raise ScenarioError(f"{where}: expected an integer")
    return x
