"""Spectral torus flow solver with norm-identity diagnostics."""

from .errors import (
    BlowUpError,
    ConfigurationError,
    InsufficientDataError,
    RescaleOverflowError,
    SnapshotFormatError,
    ZeroFieldError,
)
from .fields import (
    Grid,
    ScalarField,
    SpectralField,
    TensorField,
    curl,
    divergence,
    from_physical,
    from_physical_grid,
    gradient,
    laplacian,
    leray_project,
    make_grid,
    max_solenoidal_defect,
    scaled,
    to_physical,
    to_physical_grid,
)
from .fixtures import (
    abc_flow,
    random_solenoidal,
    random_stream_2d,
    single_mode,
    taylor_green,
)
from .norms import (
    NormReport,
    embedding_ratio,
    grad_l2_norm_sq,
    h_half_norm_sq,
    l2_norm_sq,
    lap_l2_norm_sq,
    lp_norm,
    norm_report,
    tensor_lp_norm,
)
from .balance import (
    ChainReport,
    ConstantsEstimate,
    DiagnosticsRecord,
    attach_residuals,
    chain_report,
    energy_residual,
    enstrophy_residual,
    estimate_constants,
    vortex_stretching,
    vortex_stretching_ibp,
)
from .solver import (
    SimulationConfig,
    SimulationResult,
    TrajectoryState,
    diagnose,
    initial_field,
    nonlinear_term,
    recover_pressure,
    run_simulation,
    simulate,
    step,
)
from .scaling import (
    LadderRow,
    ScalingReport,
    ns_residual,
    rescale,
    scaling_report,
    verify_chain_invariance,
    verify_h_half,
    verify_lp_ladder,
    verify_ns_covariance,
    verify_pressure_scaling,
)
from .regularity import (
    PINNED_C_EMP,
    PINNED_C_SOB,
    CriterionVerdict,
    gronwall_audit,
    poincare_constant,
    poincare_ratio,
    smallness_check,
)
from .snapshot import load_snapshot, save_snapshot

__version__ = "0.1.0"
