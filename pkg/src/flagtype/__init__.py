"""Iwasawa cocycles on flag manifolds of SL(n,R) and empirical flag types.

The library decomposes unit-determinant matrices as KAN, evaluates the
associated cocycles on flags in log domain, samples words from matrix
semigroups, and classifies each simple root by whether the minimal
cocycle value at a core point decays with word length or stays bounded
below.  The set of decaying roots is the estimated flag type.
"""

__version__ = "0.1.0"

from .cocycles import (
    WordTrace,
    restriction_invariance_check,
    rho_alpha_log,
    rho_log,
    rho_mu_oracle,
    word_cocycle,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    FlagTypeError,
    MembershipUndecidable,
    NoRegularWordFound,
    NotRegular,
    NumericFailure,
    RejectionBudgetExhausted,
    ValidationError,
)
from .estimator import (
    BOUNDED_BELOW,
    DECAYING,
    INCONCLUSIVE,
    FlagTypeEstimator,
    FlagTypeReport,
    RootDecayCurve,
    Thresholds,
    classify,
    coset_uniform_check,
    decay_curve,
    estimate_flag_type,
)
from .group import (
    Flag,
    IwasawaFactors,
    PartialFlag,
    a_cocycle,
    act,
    attractor_flag,
    flag_distance,
    iwasawa_decompose,
    project,
    random_flag,
    standard_flag,
)
from .roots import (
    Functional,
    RootDatum,
    ThetaSet,
    WeylElement,
    pairing,
    simple_reflection,
)
from .semigroups import (
    ConeCompression,
    CorePointEstimate,
    FinitelyGenerated,
    SampledWord,
    SamplingParams,
    estimate_core_point,
    ics_sample,
    membership,
    sample_word,
)

__all__ = [
    "__version__",
    "BOUNDED_BELOW",
    "DECAYING",
    "INCONCLUSIVE",
    "ConeCompression",
    "ConfigError",
    "CorePointEstimate",
    "DimensionMismatch",
    "Flag",
    "FlagTypeError",
    "FlagTypeEstimator",
    "FlagTypeReport",
    "FinitelyGenerated",
    "Functional",
    "IwasawaFactors",
    "MembershipUndecidable",
    "NoRegularWordFound",
    "NotRegular",
    "NumericFailure",
    "PartialFlag",
    "RejectionBudgetExhausted",
    "RootDatum",
    "RootDecayCurve",
    "SampledWord",
    "SamplingParams",
    "ThetaSet",
    "Thresholds",
    "ValidationError",
    "WeylElement",
    "WordTrace",
    "a_cocycle",
    "act",
    "attractor_flag",
    "classify",
    "coset_uniform_check",
    "decay_curve",
    "estimate_core_point",
    "estimate_flag_type",
    "flag_distance",
    "ics_sample",
    "iwasawa_decompose",
    "membership",
    "pairing",
    "project",
    "random_flag",
    "restriction_invariance_check",
    "rho_alpha_log",
    "rho_log",
    "rho_mu_oracle",
    "sample_word",
    "simple_reflection",
    "standard_flag",
    "word_cocycle",
]
