use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate or unordered index {index} in minor selection")]
    DuplicateIndex { index: usize },
    #[error("indices must differ, got ({a}, {b})")]
    EqualIndices { a: usize, b: usize },
    #[error("not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("Cauchy denominator 1 + xi_{k} - eta_{l} vanishes")]
    SingularDenominator { k: usize, l: usize },

    #[error("invalid coupling parameters: {0}")]
    InvalidCoupling(&'static str),
    #[error("point is outside the open Weyl chamber q_1 > ... > q_n > 0")]
    OutOfChamber,
    #[error("integration step would leave the Weyl chamber at t = {t}")]
    ChamberExit { t: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("energy drift {drift:e} exceeds bound {bound:e}")]
    EnergyDrift { drift: f64, bound: f64 },
    #[error("invalid integrator options: {0}")]
    InvalidOptions(&'static str),

    #[error("trajectory grid too coarse: need at least 3 uniformly spaced samples, got {samples}")]
    GridTooCoarse { samples: usize },
    #[error("trajectory grid is not uniformly spaced")]
    NonUniformGrid,
    #[error("flow spectrum violates reciprocal pairing (relative deviation {deviation:e})")]
    PairingViolation { deviation: f64 },
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("Lax matrix spectrum is (nearly) degenerate: gap {gap:e}")]
    DegenerateSpectrum { gap: f64 },
    #[error("component F_{index} vanishes numerically (|F| = {modulus:e})")]
    ZeroComponent { index: usize, modulus: f64 },
    #[error("lambda must be strictly decreasing and positive")]
    DegenerateLambda,
    #[error("fit window holds {samples} samples, need at least {required}")]
    WindowTooSmall { samples: usize, required: usize },
    #[error("phase shift undefined at zero momentum")]
    ZeroMomentum,
}
