//! The rational `C_n` Ruijsenaars–Schneider–van Diejen Lax matrix built from
//! the action-angle variables `(λ, θ)` of the Sutherland system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixkit::{ComplexMatrix, C64, I};
use crate::model::{CouplingParams, PhasePoint};
use crate::scattering::{spectral_frame, z_closed_form, SpectralFrame};
use crate::ScaledResidual;

/// Dual coordinates with `λ_1 > … > λ_n > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCoordinates {
    lambda: Vec<f64>,
    theta: Vec<f64>,
}

impl DualCoordinates {
    pub fn new(lambda: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != lambda.len() {
            return Err(Error::DimensionMismatch { expected: lambda.len(), got: theta.len() });
        }
        let ordered = !lambda.is_empty()
            && lambda.iter().all(|l| l.is_finite() && *l > 0.0)
            && lambda.windows(2).all(|w| w[0] > w[1]);
        if !ordered {
            return Err(Error::DegenerateLambda);
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidOptions("theta must be finite"));
        }
        Ok(Self { lambda, theta })
    }

    /// `(λ, θ)` read off a spectral frame.
    pub fn from_frame(frame: &SpectralFrame) -> Result<Self> {
        Self::new(frame.lambda.clone(), frame.theta.clone())
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

impl<'de> Deserialize<'de> for DualCoordinates {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lambda: Vec<f64>,
            theta: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        DualCoordinates::new(raw.lambda, raw.theta).map_err(serde::de::Error::custom)
    }
}

/// The `2n × 2n` matrix `Ǎ(λ, θ)`.
pub fn build_dual_lax(dc: &DualCoordinates, cp: &CouplingParams) -> Result<ComplexMatrix> {
    let n = dc.n();
    let z = z_closed_form(&dc.lambda, cp)?;
    let (lam, th) = (&dc.lambda, &dc.theta);
    let ig = I * cp.g();
    let two_ig = 2.0 * ig;
    let modz: Vec<f64> = z.iter().map(|v| v.norm()).collect();
    let mut a = ComplexMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let root = (modz[j] * modz[k]).sqrt();
            a[(j, k)] = two_ig / (two_ig + lam[j] - lam[k]) * ((th[j] + th[k]).exp() * root);
            a[(n + j, n + k)] =
                z[j].conj() * z[k] / root * (-th[j] - th[k]).exp() * two_ig / (two_ig - lam[j] + lam[k]);
            let mut off =
                z[k] * (modz[j] / modz[k]).sqrt() * (th[j] - th[k]).exp() * two_ig / (two_ig + lam[j] + lam[k]);
            if j == k {
                off += I * (cp.g() - cp.g2()) / (ig + lam[j]);
            }
            a[(j, n + k)] = off;
            a[(n + k, j)] = off.conj();
        }
    }
    Ok(a)
}

/// `Σ_c cosh(2θ_c) |z_c|`.
pub fn rsvd_hamiltonian(dc: &DualCoordinates, cp: &CouplingParams) -> Result<f64> {
    let z = z_closed_form(&dc.lambda, cp)?;
    Ok(dc.theta.iter().zip(&z).map(|(t, zc)| (2.0 * t).cosh() * zc.norm()).sum())
}

/// `tr(Ǎ + Ǎ⁻¹)/4`.
pub fn rsvd_hamiltonian_trace(a_check: &ComplexMatrix) -> Result<f64> {
    let inv = a_check.inverse()?;
    let tr: C64 = (a_check.trace() + inv.trace()) / 4.0;
    let scale = a_check.frobenius_norm() * inv.frobenius_norm() * (a_check.frobenius_norm() + inv.frobenius_norm());
    if tr.im.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation: tr.im.abs() });
    }
    Ok(tr.re)
}

/// `‖Ǎ(λ, θ) − U* e^{2Q} U‖_F` with `(λ, θ)` and `U` from the frame at `pp`.
pub fn dual_consistency_residual(pp: &PhasePoint, cp: &CouplingParams) -> Result<ScaledResidual> {
    let frame = spectral_frame(pp, cp)?;
    let dc = DualCoordinates::from_frame(&frame)?;
    let numeric = frame.a_check();
    let dual = build_dual_lax(&dc, cp)?;
    Ok(ScaledResidual { residual: (&dual - &numeric).frobenius_norm(), scale: numeric.frobenius_norm() })
}

/// `|H_RSvD(λ, θ) − Σ_c cosh(2q_c)|`; both sides equal `tr(e^{2Q} + e^{−2Q})/4`.
pub fn energy_duality_residual(pp: &PhasePoint, cp: &CouplingParams) -> Result<ScaledResidual> {
    let frame = spectral_frame(pp, cp)?;
    let dc = DualCoordinates::from_frame(&frame)?;
    let h = rsvd_hamiltonian(&dc, cp)?;
    let direct: f64 = pp.q().iter().map(|q| (2.0 * q).cosh()).sum();
    Ok(ScaledResidual { residual: (h - direct).abs(), scale: direct })
}
