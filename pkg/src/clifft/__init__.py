"""Clifford algebra Cl(p, q), the one-dimensional Clifford Fourier transform
with an arbitrary square root of -1, and Clifford-valued probability tools."""

from .algebra import (
    CMuNumber,
    ImaginaryUnit,
    InvalidImaginaryUnit,
    Multivector,
    Signature,
    SignatureMismatch,
    blade_mul,
    cmu_polar,
    gp,
    grade_project,
    is_imaginary_unit,
    modulus,
    parse_multivector,
    principal_reverse,
    scalar_product,
)
from .probability import (
    CharacteristicFunction,
    CliffordDensity,
    Exponential,
    Gaussian,
    MomentResult,
    Sampled,
    SmoothedUniform,
    Uniform,
    cdf_build,
    cf_pair_identity_defect,
    characteristic_function,
    density_from_cf,
    moment_direct,
    moment_from_cf,
    moment_modulus,
    validate_density,
    variance,
)
from .transform import (
    SampledSignal,
    Spectrum,
    TransformPlan,
    cft_forward,
    cft_inverse,
    cft_quadrature_oracle,
    convolution_via_spectra,
    convolve_direct,
    signal_right_mul,
    translate_signal,
)
from .verify import IDENTITIES, IdentityReport, VerifyConfig, identity_defect, run_suite

__version__ = "0.1.0"
