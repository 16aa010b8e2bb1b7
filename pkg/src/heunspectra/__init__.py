"""Confluent Heun functions and two-parameter spectral solver for
black-hole ringdown, quasi-bound and jet modes."""

from .errors import (
    AlphaZero,
    BranchInvalid,
    ComputeError,
    ConfigError,
    DegenerateGamma,
    DerivationFailure,
    EmptyInput,
    EvaluationFailure,
    ExtremalNotSupported,
    HeunSpectraError,
    JacobianSingular,
    NoConvergence,
    NonInvertible,
    PathTooClose,
    PoleAtMatchPoint,
    TrackLost,
)
from .heun import (
    CanonicalHeunParams,
    GeneralHeunParams,
    HeunEval,
    MapleHeunParams,
    SingularityReport,
    canonical_to_maple,
    classify_singularities,
    eval_continued,
    eval_series,
    maple_to_canonical,
)
from .boundary import (
    BoundaryKind,
    SpectralResidual,
    angular_qnm_residual,
    jet_mode_conditions,
    radial_branch_valid,
    radial_residual,
)
from .oracle import (
    angular_eigenvalue,
    schwarzschild_qnm,
    schwarzschild_qnm_modes,
)
from .solver import (
    ContinuationTrack,
    SolverSettings,
    SpectralPoint,
    continue_in_a,
    default_seed_grid,
    enumerate_modes,
    solve_point,
    stability_filter,
)
from .teukolsky import (
    Horizons,
    LocalSolution,
    PhysicalConfig,
    SpectralUnknowns,
    build_tae_solution,
    build_tre_solution,
    horizons,
    tre_coefficients,
)

__version__ = "0.1.0"
