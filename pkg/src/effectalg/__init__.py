"""Effect algebras on ordered linear spaces.

Models are finite-dimensional ordered spaces (polyhedral cones or the PSD
cone of a Hilbert space). On top of them the package provides states,
operations stored by their dual maps, observables, instruments, Holevo
(measure-and-prepare) constructions and LP-based coexistence checks.
"""
from .cone import (
    ConeModel,
    Effect,
    complement,
    effect,
    effect_add,
    effect_perp,
    effect_scale,
    gbit,
    leq,
    orthant,
    theta,
    unit_effect,
)
from .errors import (
    DimensionError,
    EffectAlgebraError,
    InvariantError,
    ModelMismatchError,
    NotMeasuredError,
    ScenarioError,
    UndefinedSumError,
    UnsupportedModelError,
    ZeroProbabilityError,
)
from .feasibility import (
    ConeBlock,
    FeasibilityResult,
    LPProblem,
    solve_feasibility,
    verify_certificate,
)
from .hilbert import (
    DensityState,
    HilbertModel,
    KrausOperation,
    born_state,
    kraus_to_operation,
    luders_instrument,
    matrix_sqrt,
)
from .holevo import (
    MixedHolevo,
    PureHolevo,
    commutant,
    commutant_laws,
    holevo_compose_identity,
    holevo_seq_effects,
    holevo_seq_observables,
    is_pure_representable,
    mixed_holevo,
    mixed_holevo_instrument,
    pure_holevo,
    pure_holevo_instrument,
)
from .instruments import (
    BiInstrument,
    Instrument,
    coexistence_propagates,
    compose_instruments,
    condition_observable,
    instrument_distribution,
    instruments_coexist,
    measured_observable,
    ovm,
    sequential_product_observables,
)
from .observables import (
    BiObservable,
    CoexistenceResult,
    Observable,
    Verdict,
    distribution,
    effects_coexist,
    evm,
    marginals,
    observables_coexist,
)
from .operations import (
    Operation,
    apply,
    compose,
    constant_channel,
    dual_apply,
    identity_operation,
    is_channel,
    is_effect_repeatable,
    is_repeatable_via,
    measured_effect,
    repeatability_conditions,
    sequential_product_effects,
    update_state,
    zero_operation,
)
from .states import (
    State,
    StateSet,
    SubState,
    evaluate,
    is_order_determining,
    max_over_states,
    state_vertices,
)

__version__ = "0.1.0"
