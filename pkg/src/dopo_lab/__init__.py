"""Degenerate parametric oscillator with self-consistent fluctuations.

Steady-state branches, Gaussian fluctuation moments, quadrature variances
and noise spectra of a driven two-mode cavity, regularized by feeding the
fluctuations back into the mean field.  Benchmarked against the decoupled
classical treatment, a critical-point perturbative expansion, and the
exact adiabatic phase-space distribution.
"""
from .correlators import (
    SpectrumCurve,
    commutator_matrix,
    default_frequency_grid,
    lorentzian_halfwidth,
    quadrature_correlations,
    quadrature_spectrum,
    stationary_covariance,
    two_time_correlator,
)
from .drummond import (
    CriticalPrediction,
    critical_moment,
    perturbative_predictions,
    threshold_variance_ratios,
)
from .dynamics import (
    IntegrationResult,
    evolution_rhs,
    integrate_to_steady_state,
    trajectory_table,
    vacuum_state,
)
from .errors import (
    CriticalPointSingularityError,
    DegenerateMarginalError,
    DopoError,
    EmptySupportError,
    GridMismatchError,
    InvalidParameterError,
    NoAboveBranchError,
    NoOnsetFoundError,
    NumericalError,
    PhysicsError,
    QuadratureError,
    RootMultiplicityError,
    SingularDenominatorError,
    StiffnessError,
    UnphysicalSolutionError,
    UsageError,
)
from .fluctuations import (
    QuadratureVariances,
    SecondMoments,
    branch_variances_from_intensities,
    build_moment_system,
    build_stability_matrix,
    closed_form_pair_moments,
    drive_vector,
    physicality_check,
    pump_quadrature_variances,
    real_moment_system,
    signal_quadrature_variances,
    solve_steady_moments,
    stability_eigenvalues,
)
from .params import (
    Branch,
    MeanField,
    Method,
    NormalizedParams,
    PhysicalParams,
    classical_steady_states,
)
from .positive_p import (
    MarginalComparison,
    MarginalCurve,
    compare_marginals,
    gaussian_marginal_curve,
    log_density,
    marginal_curve,
    normal_ordered_moment,
    support_halfwidth,
)
from .selfconsistent import (
    SteadyStateSolution,
    ThresholdAsymptotics,
    above_signal_intensity,
    classical_solve,
    coupled_stability,
    coupled_vector_field,
    find_branch,
    onset_drive,
    pack_state,
    pump_drive_residual,
    solve_branches,
    symmetric_branch_amplitude,
    threshold_asymptotics,
    unpack_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
