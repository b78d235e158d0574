"""Laser-noise-limited Ramsey and Rabi spectroscopy of atomic ensembles.

Collective phase and amplitude noise of the interrogation laser set the
precision floor of uncorrelated-ensemble spectroscopy.  This package models
both noise channels on the Dicke (permutation-symmetric) subspace, provides
exact propagators, Lindblad integration, exactly closed moment dynamics,
sensitivity optimization, and independent stochastic-trajectory and
product-space oracles, plus a CLI for sweeps and figure presets.
"""

from .basis import (
    OPERATOR_KINDS,
    CollectiveState,
    DickeBasis,
    SplitBasis,
    build_operator,
    coherent_state_after_first_pulse,
    collective_operator,
    embed,
    ground_state,
    rotation_y,
)
from .dynamics import (
    SCHEMES,
    IntegrationError,
    NoiseModel,
    conjugate_dephasing_propagate,
    dephasing_propagate,
    evolve,
    integrate_lindblad,
    lindblad_rhs,
    normalize_scheme,
    split_dephasing_propagate,
)
from .moments import (
    rabi_moment_expectations,
    ramsey_moment_expectations,
)
from .oracles import (
    ProjectedEvolution,
    ScalarSdeResult,
    TrajectoryConfig,
    TrajectoryIntegrityError,
    bootstrap_stderr,
    full_space_propagate,
    product_space_operator,
    scalar_sde_check,
    stochastic_ensemble_average,
    stochastic_trajectory_projectors,
    symmetric_isometry,
)
from .rabi import (
    RabiProfile,
    default_detuning_grid,
    rabi_profile,
    rabi_scaling_study,
    rabi_sensitivity,
)
from .ramsey import (
    RamseyOutcome,
    SpectroscopyResult,
    amplitude_detuning_grid,
    amplitude_noise_atom_scaling,
    amplitude_noise_sensitivity_curve,
    ramsey_profile,
    ramsey_second_moment_analytic,
    ramsey_sensitivity_analytic,
    ramsey_signal_analytic,
    ramsey_simulate,
)
from .sensitivity import (
    DegenerateProfileError,
    SensitivityPoint,
    loglog_fit,
    optimize_tau,
    saturation_bound,
    sensitivity_functional,
)
from .validation import CheckResult, run_validation

__version__ = "0.1.0"

__all__ = [
    "OPERATOR_KINDS",
    "SCHEMES",
    "CheckResult",
    "CollectiveState",
    "DegenerateProfileError",
    "DickeBasis",
    "IntegrationError",
    "NoiseModel",
    "ProjectedEvolution",
    "RabiProfile",
    "RamseyOutcome",
    "ScalarSdeResult",
    "SensitivityPoint",
    "SpectroscopyResult",
    "SplitBasis",
    "TrajectoryConfig",
    "TrajectoryIntegrityError",
    "amplitude_detuning_grid",
    "amplitude_noise_atom_scaling",
    "amplitude_noise_sensitivity_curve",
    "bootstrap_stderr",
    "build_operator",
    "coherent_state_after_first_pulse",
    "collective_operator",
    "conjugate_dephasing_propagate",
    "default_detuning_grid",
    "dephasing_propagate",
    "embed",
    "evolve",
    "full_space_propagate",
    "ground_state",
    "integrate_lindblad",
    "lindblad_rhs",
    "loglog_fit",
    "normalize_scheme",
    "optimize_tau",
    "product_space_operator",
    "rabi_moment_expectations",
    "rabi_profile",
    "rabi_scaling_study",
    "rabi_sensitivity",
    "ramsey_moment_expectations",
    "ramsey_profile",
    "ramsey_second_moment_analytic",
    "ramsey_sensitivity_analytic",
    "ramsey_signal_analytic",
    "ramsey_simulate",
    "rotation_y",
    "run_validation",
    "saturation_bound",
    "scalar_sde_check",
    "sensitivity_functional",
    "split_dephasing_propagate",
    "stochastic_ensemble_average",
    "stochastic_trajectory_projectors",
    "symmetric_isometry",
]
