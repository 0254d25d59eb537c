//! Numerical laboratory for the hyperbolic `C_n` Sutherland system.
//!
//! * [`model`]: couplings, phase space, energy and an adaptive integrator.
//! * [`lax`]: the Lax matrices and their defining identities.
//! * [`specflow`]: positions from the exponential matrix flow.
//! * [`scattering`]: spectral frame, asymptotic data and phase shifts.
//! * [`dual`]: the rational RSvD Lax matrix in action-angle variables.
//! * [`matrixkit`]: dense complex linear algebra and determinant identities.

pub mod dual;
pub mod error;
pub mod lax;
pub mod matrixkit;
pub mod model;
pub mod scattering;
pub mod specflow;
pub mod tolerances;

use serde::Serialize;

pub use dual::DualCoordinates;
pub use error::{Error, Result};
pub use matrixkit::{ComplexMatrix, C64};
pub use model::{CouplingParams, IntegratorOptions, PhasePoint, Trajectory};
pub use scattering::{AsymptoticData, SpectralFrame};

/// An absolute residual with the magnitude it should be compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledResidual {
    pub residual: f64,
    pub scale: f64,
}

impl ScaledResidual {
    /// `residual / max(scale, 1)`.
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }

    pub fn within(&self, bound: f64) -> bool {
        self.relative() <= bound
    }
}
