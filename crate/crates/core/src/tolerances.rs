//! Numerical thresholds shared across the crate.
//!
//! Residual bounds are relative to the Frobenius-norm scale of the objects
//! involved unless the name says otherwise.

/// Relative singularity threshold: a pivot or determinant below
/// `SINGULAR_REL * scale` is treated as zero.
pub const SINGULAR_REL: f64 = 1e-12;

/// Hermiticity check used as a precondition by the eigensolver.
pub const HERMITIAN_REL: f64 = 1e-12;

/// Default eigen-residual tolerance (relative to `‖A‖_F`).
pub const EIG_TOL: f64 = 1e-12;

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative spectral gap below which `L` is declared degenerate.
pub const DEGENERATE_GAP_REL: f64 = 1e-8;

/// `|F_k|` below this fraction of `‖F‖` violates the non-vanishing property.
pub const ZERO_COMPONENT_REL: f64 = 1e-10;

/// Relative tolerance for the reciprocal pairing `μ_k μ_{N+1-k} = 1`.
pub const PAIRING_REL: f64 = 1e-9;

/// Smallest admissible integrator step.
pub const MIN_STEP: f64 = 1e-14;

/// Default integrator tolerances.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_ENERGY_DRIFT: f64 = 1e-8;

/// Default long-time horizon and fit window fraction for asymptotic fits.
pub const DEFAULT_SCATTER_T: f64 = 20.0;
pub const DEFAULT_FIT_WINDOW_FRACTION: f64 = 0.75;
/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Residual bounds reported by the verification harness.
pub const COMMUTATION_BOUND: f64 = 1e-11;
pub const CHECK_A_BOUND: f64 = 1e-9;
pub const QUAD_EQN_BOUND: f64 = 1e-10;
pub const Z_EQUATION_BOUND: f64 = 1e-8;
pub const Z_BRANCH_BOUND: f64 = 1e-8;
pub const DUAL_CONSISTENCY_BOUND: f64 = 1e-8;
pub const THEOREM3_CLOSED_FORM_BOUND: f64 = 1e-9;
pub const THEOREM3_FIT_BOUND: f64 = 1e-3;
pub const LAX_RESIDUAL_REL_BOUND: f64 = 1e-4;
pub const FLOW_VS_ODE_BOUND: f64 = 1e-7;
pub const IDENTITY_SUITE_BOUND: f64 = 1e-9;
