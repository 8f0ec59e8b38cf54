"""Spectral time-splitting solvers for cubic dispersive and diffusive
equations, with commutator-modified fourth-order schemes and an
experiment harness for convergence, conservation, and order-reduction
studies."""

from .diagnostics import (
    EnergySeries,
    ProbeResult,
    discrete_l2,
    discrete_l2_error,
    energy,
    energy_series,
    observed_order,
    order_reduction_probe,
    scalar_cubic_flow,
    scalar_cubic_holomorphic_flow,
)
from .experiments import (
    ConvergenceReport,
    ConvergenceRow,
    EnergyReport,
    ExperimentConfig,
    ProbeReport,
    ValidationCheck,
    ValidationReport,
    localized_random_state,
    run_convergence,
    run_energy,
    run_order_reduction,
    run_validate,
    write_convergence_csv,
    write_energy_csv,
    write_probe_csv,
)
from .figures import (
    render_convergence_figure,
    render_energy_figure,
    render_probe_figure,
)
from .flows import (
    BackwardFlowWarning,
    BlowUpError,
    diffusive_composite_flow,
    diffusive_local_exact_flow,
    dispersive_local_flow,
    linear_flow,
    rk4_combined_flow,
)
from .integrators import (
    SCHEME_NAMES,
    FlowStrategy,
    IntegrationResult,
    IntegrationRun,
    SplittingScheme,
    Stage,
    StageKind,
    apply_scheme_step,
    default_strategy,
    integrate,
    make_run,
    make_scheme,
    splitting_step,
)
from .model import (
    EquationKind,
    PotentialData,
    PotentialSpec,
    ProblemSpec,
    evaluate_potential,
    exact_linear_solution,
    gaussian_initial_state,
    matched_amplitude,
)
from .operators import (
    CommutatorCheck,
    OperatorContext,
    apply_first_commutator,
    apply_local,
    apply_second_commutator,
    apply_stiff,
    commutator_oracle,
    gateaux_fd,
    local_derivative,
    make_context,
    modified_phase,
)
from .spectral import (
    Grid,
    band_limited_state,
    build_grid,
    from_spectral,
    spectral_derivatives,
    spectral_gradient,
    spectral_laplacian,
    to_spectral,
)

__version__ = "0.1.0"

__all__ = [
    "BackwardFlowWarning",
    "BlowUpError",
    "CommutatorCheck",
    "ConvergenceReport",
    "ConvergenceRow",
    "EnergyReport",
    "EnergySeries",
    "EquationKind",
    "ExperimentConfig",
    "FlowStrategy",
    "Grid",
    "IntegrationResult",
    "IntegrationRun",
    "OperatorContext",
    "PotentialData",
    "PotentialSpec",
    "ProbeReport",
    "ProbeResult",
    "ProblemSpec",
    "SCHEME_NAMES",
    "SplittingScheme",
    "Stage",
    "StageKind",
    "ValidationCheck",
    "ValidationReport",
    "apply_first_commutator",
    "apply_local",
    "apply_scheme_step",
    "apply_second_commutator",
    "apply_stiff",
    "band_limited_state",
    "build_grid",
    "commutator_oracle",
    "default_strategy",
    "diffusive_composite_flow",
    "diffusive_local_exact_flow",
    "discrete_l2",
    "discrete_l2_error",
    "dispersive_local_flow",
    "energy",
    "energy_series",
    "evaluate_potential",
    "exact_linear_solution",
    "from_spectral",
    "gateaux_fd",
    "gaussian_initial_state",
    "integrate",
    "linear_flow",
    "local_derivative",
    "localized_random_state",
    "make_context",
    "make_run",
    "make_scheme",
    "matched_amplitude",
    "modified_phase",
    "observed_order",
    "order_reduction_probe",
    "render_convergence_figure",
    "render_energy_figure",
    "render_probe_figure",
    "rk4_combined_flow",
    "run_convergence",
    "run_energy",
    "run_order_reduction",
    "run_validate",
    "scalar_cubic_flow",
    "scalar_cubic_holomorphic_flow",
    "spectral_derivatives",
    "spectral_gradient",
    "spectral_laplacian",
    "splitting_step",
    "to_spectral",
    "write_convergence_csv",
    "write_energy_csv",
    "write_probe_csv",
    "__version__",
]
