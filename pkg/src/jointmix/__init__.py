"""Joint mixability toolkit: verdicts, constant-sum couplings, and
rearrangement-based numerical evidence."""

from .generators import CharacteristicGenerator, MixingLaw, cg_eval, mixing_law, sample_mixing
from .families import (
    BimodalMoment,
    BimodalPower,
    Elliptical,
    GeneralizedLogistic,
    KotzType,
    LocationScaleSymmetric,
    MixtureFamily,
    SkewNormal,
    SlashElliptical,
    SSMN,
    Uniform,
    UnivariateFamily,
    family_from_spec,
)
from .mixability import (
    JM,
    NOT_JM,
    UNKNOWN,
    MixabilityVerdict,
    check_scale_inequality,
    jm_verdict_elliptical,
    jm_verdict_unimodal_location_scale,
    not_jm_bounded_symmetric,
    not_jm_unbounded_symmetric,
    skewnormal_noncm_certificate,
    ssmn_noncm_certificate,
)
from .couplings import (
    EquicorrelationPlan,
    MatrixSampleBatch,
    PolygonInequalityError,
    SampleBatch,
    elliptical_jm_covariance,
    polygon_unit_vectors,
    sample_cm_scale_mixture,
    sample_jm_elliptical,
    sample_jm_slash,
    sample_matrix_variate_cm,
    transform_center,
)
from .oracle import (
    QuantileGrid,
    RearrangementResult,
    brute_force_min_spread,
    discretize,
    ra_minimize,
    verify_constant_sum,
)

__version__ = "0.1.0"
