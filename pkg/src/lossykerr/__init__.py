"""Coherent-pulse propagation through a lossy Kerr medium.

Exact Fock-basis output states, the Gaussian phase-diffusion model of the
loss-nonlinearity interplay, information and squeezing figures of merit,
and a CLI emitting deterministic sweep data with rendered figures.
"""

from .fock import (
    CoherentAmplitude,
    DensityOperator,
    DimensionTooSmallError,
    FockDim,
    PoissonWeights,
    ValidationReport,
    coherent_projector,
    coherent_state_vector,
    poisson_tail,
    poisson_weights,
    truncation_dimension,
    validate_density_operator,
)
from .channel import (
    ChannelGeometry,
    ConvergenceError,
    FiberSpec,
    MediumParams,
    PhaseDiffusionParams,
    apply_kerr_phase,
    decoherence_exponent,
    decoherence_exponent_quadratic,
    dimensionless_nonlinearity,
    exact_output_state,
    integrate_master_equation,
    make_channel,
    offdiagonal_decay_factor,
    phase_diffused_state,
    phase_diffusion_params,
)
from .metrics import (
    GridCoverageWarning,
    HolevoPoint,
    QGrid,
    gaussian_approximation_infidelity,
    holevo_ring,
    husimi_q,
    infidelity_map,
    poisson_entropy,
    q_grid_axes,
    uhlmann_fidelity,
    von_neumann_entropy,
)
from .squeezing import (
    QuadratureStats,
    SqueezingInput,
    approx_min_variance,
    excess_noise_factor,
    min_variance,
    optimal_angle,
    phase_moments,
    quadrature_stats,
    squeezing_curve,
    variance_at_angle,
)
from .sweep import (
    RunConfig,
    SchemaVersionError,
    SweepResult,
    read_sweep,
    write_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CoherentAmplitude", "DensityOperator", "DimensionTooSmallError",
    "FockDim", "PoissonWeights", "ValidationReport", "coherent_projector",
    "coherent_state_vector", "poisson_tail", "poisson_weights",
    "truncation_dimension", "validate_density_operator",
    "ChannelGeometry", "ConvergenceError", "FiberSpec", "MediumParams",
    "PhaseDiffusionParams", "apply_kerr_phase", "decoherence_exponent",
    "decoherence_exponent_quadratic", "dimensionless_nonlinearity",
    "exact_output_state", "integrate_master_equation", "make_channel",
    "offdiagonal_decay_factor", "phase_diffused_state",
    "phase_diffusion_params",
    "GridCoverageWarning", "HolevoPoint", "QGrid",
    "gaussian_approximation_infidelity", "holevo_ring", "husimi_q",
    "infidelity_map", "poisson_entropy", "q_grid_axes", "uhlmann_fidelity",
    "von_neumann_entropy",
    "QuadratureStats", "SqueezingInput", "approx_min_variance",
    "excess_noise_factor", "min_variance", "optimal_angle", "phase_moments",
    "quadrature_stats", "squeezing_curve", "variance_at_angle",
    "RunConfig", "SchemaVersionError", "SweepResult", "read_sweep",
    "write_sweep",
]
