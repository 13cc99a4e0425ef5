"""gravpipe: gravitationally bound quantum states above a mirror.

Numerical library and CLI for ultracold particles stored in the linear
gravitational potential over a horizontal mirror: the Airy spectrum and
its semiclassical limit, quasi-stationary complex energies under flat and
rough absorbing ceilings (direct, inverted, gravity-free and
stepped-mirror geometries), the transmitted-flux staircase measured by
slit experiments, and the resolution/fit analysis of such data.

All dimensioned quantities carry their unit in the name (``_um``,
``_peV``, ``_s``, ``_cm``, ``_ms`` for m/s); dimensionless eigenvalues
are ``lam`` throughout, related to energies by ``E = eps0 * lam`` and to
turning heights by ``H = l0 * lam``.
"""

from __future__ import annotations

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("gravpipe")
except _metadata.PackageNotFoundError:  # pragma: no cover - source tree use
    __version__ = "0.0.0"

from .absorber import (
    ScatteringLength,
    ValidityWarning,
    WoodsSaxon,
    absorption_probability,
    grating_effective_potential,
    kappa,
    reflection_probability,
    rough_effective_length,
    ws_scattering_length,
)
from .airy import (
    AiryPair,
    AiryRangeError,
    ScaledAiryPair,
    ai_negative_zeros,
    airy_eval,
    airy_eval_scaled,
    wkb_zero_estimate,
)
from .analysis import (
    FitResult,
    ResolutionReport,
    fit_step_model,
    resolution,
    resolvable_count_bound,
    synthetic_step_data,
    tau_abs_flat,
    tau_abs_rough,
)
from .eigen import (
    ComplexMode,
    ContinuationError,
    ConvergenceError,
    InverseWidth,
    ModeFunction,
    box_collision_rate,
    box_width_leading,
    dlambda_dh_two_wall,
    inverse_width_deep,
    inverse_width_limit,
    mode_function,
    overlap_biorthogonal,
    overlap_hermitian,
    shift_perturbative,
    solve_box,
    solve_direct,
    solve_direct_sweep,
    solve_inverse,
    solve_two_wall,
    two_wall_roots,
    width_perturbative,
)
from .flux import (
    AveragedFluxPoint,
    FluxCurve,
    InterferenceFlux,
    VelocityDistribution,
    WaveguideConfig,
    ZeroGravityFlux,
    averaged_flux_curve,
    critical_height,
    expansion_coefficients,
    flux_averaged,
    flux_interference,
    flux_interference_velocity_averaged,
    flux_ratio_inverse,
    flux_zero_gravity,
    inverse_flux_curve,
    normalized_overlap_matrix,
    step_model_curve,
    step_model_flux,
    zero_gravity_flux_curve,
)
from .gravspec import (
    GravState,
    bounce_frequency,
    count_states_wkb,
    spectrum,
    tau_long,
    tau_long_lambda,
    tunneling_probability,
    wkb_lambda,
)
from .repop import (
    StepGeometry,
    flux_with_step,
    ground_state_population_scan,
    ideal_overlap,
    repopulation_matrix,
    table_overlap_column,
)
from .roughdyn import (
    RoughnessDrive,
    SingularCouplingError,
    TwoStateSolution,
    coupling_alpha,
    flux_rough,
    resonant_partner,
    rough_envelope_width,
    rough_width,
    two_state_evolve,
    two_state_solution,
)
from .scales import HBAR_PEV_S, PEV_TO_J, PhysicalScales, neutron_scales

__all__ = [
    "__version__",
    # scales
    "PhysicalScales", "neutron_scales", "HBAR_PEV_S", "PEV_TO_J",
    # airy
    "AiryPair", "ScaledAiryPair", "AiryRangeError", "airy_eval",
    "airy_eval_scaled", "ai_negative_zeros", "wkb_zero_estimate",
    # gravspec
    "GravState", "spectrum", "wkb_lambda", "bounce_frequency",
    "tunneling_probability", "tau_long", "tau_long_lambda",
    "count_states_wkb",
    # absorber
    "WoodsSaxon", "ScatteringLength", "ValidityWarning", "kappa",
    "ws_scattering_length", "absorption_probability",
    "reflection_probability", "grating_effective_potential",
    "rough_effective_length",
    # eigen
    "ComplexMode", "ModeFunction", "ContinuationError", "ConvergenceError",
    "InverseWidth", "solve_direct", "solve_direct_sweep", "solve_two_wall",
    "two_wall_roots", "solve_inverse", "solve_box", "box_collision_rate",
    "box_width_leading", "width_perturbative", "shift_perturbative",
    "inverse_width_limit", "inverse_width_deep", "mode_function",
    "overlap_biorthogonal", "overlap_hermitian", "dlambda_dh_two_wall",
    # flux
    "VelocityDistribution", "WaveguideConfig", "FluxCurve",
    "InterferenceFlux", "AveragedFluxPoint", "ZeroGravityFlux",
    "expansion_coefficients", "normalized_overlap_matrix",
    "flux_interference", "flux_interference_velocity_averaged",
    "flux_averaged", "averaged_flux_curve", "step_model_flux",
    "step_model_curve", "flux_zero_gravity", "zero_gravity_flux_curve",
    "critical_height", "flux_ratio_inverse", "inverse_flux_curve",
    # roughdyn
    "RoughnessDrive", "TwoStateSolution", "SingularCouplingError",
    "coupling_alpha", "resonant_partner", "two_state_solution",
    "two_state_evolve", "rough_width", "rough_envelope_width", "flux_rough",
    # repop
    "StepGeometry", "repopulation_matrix", "ideal_overlap",
    "table_overlap_column", "flux_with_step",
    "ground_state_population_scan",
    # analysis
    "ResolutionReport", "FitResult", "resolution",
    "resolvable_count_bound", "tau_abs_flat", "tau_abs_rough",
    "fit_step_model", "synthetic_step_data",
]
