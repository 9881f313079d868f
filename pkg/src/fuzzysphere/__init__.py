"""Numerical laboratory for positive quantizations of the two-sphere.

Band-limited functions and quadrature live in sphere_fn; the coherent-state
quantizer and its axioms in quantization; cocycle and metric extraction in
unsharpness; measurement-theoretic checks in povm_measure; derived quantizers
in smearing; the rotation-equivariant classification in equivariant. The cli
module batches everything into CSV artifacts.
"""
from .backend import BACKEND
from .operator_core import (
    commutator,
    hermitize,
    jordan_product,
    operator_norm,
    random_density,
    spectral_norm,
)
from .quantization import (
    ToeplitzQuantizer,
    axiom_report,
    coherent_state,
    covariance_residual,
    noise_operator,
    rawnsley_function,
    rotation_unitary,
    spin_matrices,
)
from .sphere_fn import (
    CONVENTION,
    QuadratureGrid,
    SpherePoint,
    SphereFunction,
    build_grid,
    constant,
    coordinate,
    grad_pairing,
    harmonic,
    heat_flow,
    laplacian,
    legendre,
    multiply,
    poisson_bracket,
    project,
    random_function,
    rotate_function,
)
from .unsharpness import (
    CocycleEstimate,
    MetricField,
    cocycle_estimate,
    cocycle_extrapolate,
    hochschild_residual,
    leibniz_residual,
    metric_decompose,
    metric_pairing,
    metric_reconstruct,
    total_unsharpness,
)
from .povm_measure import (
    DiscretePOVM,
    NaimarkDilation,
    discretize_povm,
    naimark_dilate,
    noise_operator_discrete,
    variance_identity_check,
    verify_noise_inequality,
)
from .smearing import (
    RhoField,
    SmearedQuantizer,
    heat_quantizer,
    markov_smear_apply,
    metaplectic_quantizer,
    rho_isotropic,
    rho_quantizer,
    rho_zz,
    vector_twist_quantizer,
)
from .equivariant import (
    ClassificationReport,
    EquivariantQuantization,
    classify_to_t,
    extract_multipliers,
    fit_mu,
    legendre_identity_check,
    spectral_quantizer,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
