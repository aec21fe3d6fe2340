"""Exception hierarchy shared by every module."""


class EffectAlgebraError(Exception):
    """Base class for all library errors."""


class DimensionError(EffectAlgebraError, ValueError):
    """Coordinate vector or matrix has the wrong shape for its model."""


class ModelMismatchError(EffectAlgebraError, ValueError):
    """Two objects live on different ordered spaces."""


class InvariantError(EffectAlgebraError, ValueError):
    """A constructor received data violating a type invariant."""


class UndefinedSumError(EffectAlgebraError, ValueError):
    """The partial sum a + b was requested for effects that are not orthogonal."""


class ZeroProbabilityError(EffectAlgebraError, ZeroDivisionError):
    """State update requested for an effect that (almost) never occurs."""


class UnsupportedModelError(EffectAlgebraError, NotImplementedError):
    """Operation is not available for this cone backend."""


class NotMeasuredError(EffectAlgebraError, ValueError):
    """An operation or instrument does not measure the effect/observable given."""


class ScenarioError(EffectAlgebraError, ValueError):
    """A scenario file is malformed or references an unknown name."""
