//! Spectral frame of `L`, the quantities `F`, `z`, `θ`, and the scattering
//! data of the Sutherland flow.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lax::{build_l, exp_q, exp_q_e};
use crate::matrixkit::{c_matrix, hermitian_eigen, inner, vec_norm, ComplexMatrix, C64, I, ONE};
use crate::model::{CouplingParams, PhasePoint, Trajectory};
use crate::tolerances::{DEGENERATE_GAP_REL, EIG_TOL, MIN_FIT_SAMPLES, ZERO_COMPONENT_REL};
use crate::ScaledResidual;

/// Diagonalizing frame of `L` in the unitary centralizer of `C`, with the
/// phase convention `f_c > 0`.
#[derive(Clone, Debug)]
pub struct SpectralFrame {
    /// Positive eigenvalues of `L`, strictly decreasing.
    pub lambda: Vec<f64>,
    /// Columns `u_1 … u_n, C u_1 … C u_n`.
    pub u: ComplexMatrix,
    /// `F = U* e^{Q} E`.
    pub big_f: Vec<C64>,
    pub f: Vec<f64>,
    pub h: Vec<C64>,
    pub z: Vec<C64>,
    /// `x_k` for all `2n` indices; `x_c = λ_c/(2ig)`, `x_{n+c} = −x_c`.
    pub x: Vec<C64>,
    pub theta: Vec<f64>,
    /// Positions the frame was built at.
    pub q: Vec<f64>,
}

impl SpectralFrame {
    pub fn new(pp: &PhasePoint, cp: &CouplingParams) -> Result<Self> {
        Self::from_lax_matrix(&build_l(pp, cp)?, pp.q(), cp)
    }

    /// Frame of an arbitrary element of `u(n,n)_−` together with positions
    /// `q` entering `F`.
    pub fn from_lax_matrix(l: &ComplexMatrix, q: &[f64], cp: &CouplingParams) -> Result<Self> {
        let n = q.len();
        if l.rows() != 2 * n || l.cols() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: l.rows() });
        }
        let c = c_matrix(n);
        let norm = l.frobenius_norm();
        let anti = l.anticommutator(&c).frobenius_norm();
        if anti > 1e-10 * norm.max(1.0) {
            return Err(Error::EigenFailure(format!("matrix does not anticommute with C (deviation {anti:e})")));
        }
        let eig = hermitian_eigen(l, EIG_TOL)?;
        let lambda = eig.eigenvalues[..n].to_vec();
        let mut gap = f64::INFINITY;
        for a in 0..n {
            gap = gap.min(2.0 * lambda[a]);
            for b in a + 1..n {
                gap = gap.min(lambda[a] - lambda[b]);
            }
        }
        if gap <= DEGENERATE_GAP_REL * norm {
            return Err(Error::DegenerateSpectrum { gap });
        }
        let vectors: Vec<Vec<C64>> = (0..n).map(|k| eig.vector(k)).collect();
        Self::from_positive_eigenvectors(lambda, vectors, q, cp)
    }

    /// Assembles the frame from unit eigenvectors for the positive
    /// eigenvalues, carrying arbitrary phases, and fixes the phases.
    pub fn from_positive_eigenvectors(
        lambda: Vec<f64>,
        mut vectors: Vec<Vec<C64>>,
        q: &[f64],
        cp: &CouplingParams,
    ) -> Result<Self> {
        let n = q.len();
        if lambda.len() != n || vectors.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: lambda.len().min(vectors.len()) });
        }
        if !is_strictly_decreasing_positive(&lambda) {
            return Err(Error::DegenerateLambda);
        }
        let v = exp_q_e(q);
        let tol = ZERO_COMPONENT_REL * vec_norm(&v);
        for (k, u) in vectors.iter_mut().enumerate() {
            let fk = inner(u, &v);
            if fk.norm() < tol {
                return Err(Error::ZeroComponent { index: k, modulus: fk.norm() });
            }
            let phase = fk / fk.norm();
            u.iter_mut().for_each(|x| *x *= phase);
        }
        let mut columns = vectors.clone();
        for u in &vectors {
            let mut cu = u[n..].to_vec();
            cu.extend_from_slice(&u[..n]);
            columns.push(cu);
        }
        let u = ComplexMatrix::from_columns(&columns);
        let big_f = u.adjoint().mul_vec(&v);
        for (k, fk) in big_f.iter().enumerate() {
            if fk.norm() < tol {
                return Err(Error::ZeroComponent { index: k, modulus: fk.norm() });
            }
        }
        let f: Vec<f64> = big_f[..n].iter().map(|z| z.re).collect();
        let h = big_f[n..].to_vec();
        let z: Vec<C64> = f.iter().zip(&h).map(|(fc, hc)| hc.conj() * *fc).collect();
        let theta = f.iter().zip(&z).map(|(fc, zc)| (fc / zc.norm().sqrt()).ln()).collect();
        let xs: Vec<C64> = lambda.iter().map(|l| C64::new(*l, 0.0) / (2.0 * I * cp.g())).collect();
        let x = xs.iter().copied().chain(xs.iter().map(|v| -v)).collect();
        Ok(Self { lambda, u, big_f, f, h, z, x, theta, q: q.to_vec() })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `U* e^{2Q} U`.
    pub fn a_check(&self) -> ComplexMatrix {
        &(&self.u.adjoint() * &exp_q(&self.q, 2.0)) * &self.u
    }

    /// `Ǎ` from the entry formula `(F_k F̄_l + ε C_kl)/(1 + x_k − x_l)`.
    pub fn a_check_formula(&self, cp: &CouplingParams) -> ComplexMatrix {
        let n = self.n();
        let c = c_matrix(n);
        let eps = cp.epsilon();
        let f = &self.big_f;
        ComplexMatrix::from_fn(2 * n, 2 * n, |k, l| {
            (f[k] * f[l].conj() + c[(k, l)] * eps) / (ONE + self.x[k] - self.x[l])
        })
    }

    /// `Ǎ⁻¹` from `((CF)_k conj((CF)_l) + ε C_kl)/(1 − x_k + x_l)`.
    pub fn a_check_inverse_formula(&self, cp: &CouplingParams) -> ComplexMatrix {
        let n = self.n();
        let c = c_matrix(n);
        let eps = cp.epsilon();
        let cf = c.mul_vec(&self.big_f);
        ComplexMatrix::from_fn(2 * n, 2 * n, |k, l| {
            (cf[k] * cf[l].conj() + c[(k, l)] * eps) / (ONE - self.x[k] + self.x[l])
        })
    }
}

fn is_strictly_decreasing_positive(lambda: &[f64]) -> bool {
    !lambda.is_empty() && lambda.iter().all(|l| l.is_finite() && *l > 0.0) && lambda.windows(2).all(|w| w[0] > w[1])
}

pub fn spectral_frame(pp: &PhasePoint, cp: &CouplingParams) -> Result<SpectralFrame> {
    SpectralFrame::new(pp, cp)
}

/// `z_c = −(1 + i g₂/λ_c) ∏_{a≠c} (1 + 2ig/(λ_c − λ_a))(1 + 2ig/(λ_c + λ_a))`.
pub fn z_closed_form(lambda: &[f64], cp: &CouplingParams) -> Result<Vec<C64>> {
    if !is_strictly_decreasing_positive(lambda) {
        return Err(Error::DegenerateLambda);
    }
    let ig2 = 2.0 * I * cp.g();
    Ok(lambda
        .iter()
        .enumerate()
        .map(|(c, &lc)| {
            let mut z = -(ONE + I * cp.g2() / lc);
            for (a, &la) in lambda.iter().enumerate() {
                if a != c {
                    z *= (ONE + ig2 / (lc - la)) * (ONE + ig2 / (lc + la));
                }
            }
            z
        })
        .collect())
}

/// The second root of the quadratic relation for `z_c`, discarded by
/// continuity from the free regime.
pub fn z_other_branch(lambda: &[f64], cp: &CouplingParams) -> Result<Vec<C64>> {
    if !is_strictly_decreasing_positive(lambda) {
        return Err(Error::DegenerateLambda);
    }
    let n = lambda.len();
    let x: Vec<C64> = lambda.iter().map(|l| C64::new(*l, 0.0) / (2.0 * I * cp.g())).collect();
    let eps = cp.epsilon();
    Ok((0..n)
        .map(|c| {
            let mut z = ONE + (1.0 + eps) / (2.0 * x[c]);
            for a in (0..n).filter(|&a| a != c) {
                z *= (ONE + ONE / (x[c] - x[a])) * (ONE + ONE / (x[c] + x[a]));
            }
            z
        })
        .collect())
}

/// `ω_c = ∏_{a≠c} (x_c − x_a)(x_c + x_a) / ((1 + x_c − x_a)(1 + x_c + x_a))`
/// over the first `n` entries of `x`.
pub fn omega(x: &[C64]) -> Vec<C64> {
    (0..x.len())
        .map(|c| {
            let mut w = ONE;
            for a in (0..x.len()).filter(|&a| a != c) {
                w *= (x[c] - x[a]) * (x[c] + x[a]) / ((ONE + x[c] - x[a]) * (ONE + x[c] + x[a]));
            }
            w
        })
        .collect()
}

/// Residuals of `(1 − 2x_c) ω_c z_c + (1 + 2x_c) ω̄_c z̄_c + 2ε = 0` for
/// given `z` and the first `n` entries `x`.
pub fn z_linear_residual_raw(z: &[C64], x: &[C64], epsilon: f64) -> Vec<ScaledResidual> {
    let w = omega(x);
    (0..z.len())
        .map(|c| {
            let t1 = (ONE - 2.0 * x[c]) * w[c] * z[c];
            let t2 = (ONE + 2.0 * x[c]) * w[c].conj() * z[c].conj();
            ScaledResidual {
                residual: (t1 + t2 + 2.0 * epsilon).norm(),
                scale: t1.norm() + t2.norm() + 2.0 * epsilon.abs(),
            }
        })
        .collect()
}

/// Residuals of `4x_c² |ω_c z_c|² + ε(ω_c z_c + conj) + ε² + 1 − 4x_c² = 0`.
pub fn z_quadratic_residual_raw(z: &[C64], x: &[C64], epsilon: f64) -> Vec<ScaledResidual> {
    let w = omega(x);
    (0..z.len())
        .map(|c| {
            let wz = w[c] * z[c];
            let x2 = 4.0 * x[c] * x[c];
            let value = x2 * wz.norm_sqr() + epsilon * (wz + wz.conj()) + epsilon * epsilon + 1.0 - x2;
            ScaledResidual {
                residual: value.norm(),
                scale: x2.norm() * wz.norm_sqr()
                    + 2.0 * epsilon.abs() * wz.norm()
                    + epsilon * epsilon
                    + 1.0
                    + x2.norm(),
            }
        })
        .collect()
}

pub fn z_linear_residual(frame: &SpectralFrame, cp: &CouplingParams) -> Vec<ScaledResidual> {
    z_linear_residual_raw(&frame.z, &frame.x[..frame.n()], cp.epsilon())
}

pub fn z_quadratic_residual(frame: &SpectralFrame, cp: &CouplingParams) -> Vec<ScaledResidual> {
    z_quadratic_residual_raw(&frame.z, &frame.x[..frame.n()], cp.epsilon())
}

/// Deviations of the numerically conjugated `e^{±2Q}` from the entry formulas.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckAResidual {
    pub a_check: ScaledResidual,
    pub a_check_inverse: ScaledResidual,
    /// `max_k |Σ_j Ǎ_kj (Ǎ⁻¹)_jk − 1|` with both factors from the formulas.
    pub quad_eqn_diagonal: f64,
    /// `max_{k,l} |Σ_j Ǎ_kj (Ǎ⁻¹)_jl − δ_kl|`, each entry divided by
    /// `max(1, Σ_j |Ǎ_kj| |(Ǎ⁻¹)_jl|)`.
    pub quad_eqn: f64,
}

pub fn check_a_entries_residual(frame: &SpectralFrame, pp: &PhasePoint, cp: &CouplingParams) -> Result<CheckAResidual> {
    if pp.q() != frame.q.as_slice() {
        return Err(Error::DimensionMismatch { expected: frame.n(), got: pp.n() });
    }
    let numeric = frame.a_check();
    let numeric_inv = &(&frame.u.adjoint() * &exp_q(pp.q(), -2.0)) * &frame.u;
    let formula = frame.a_check_formula(cp);
    let formula_inv = frame.a_check_inverse_formula(cp);
    let m = formula.rows();
    let (mut quad, mut quad_diag) = (0.0f64, 0.0f64);
    for k in 0..m {
        for l in 0..m {
            let (mut sum, mut mag) = (C64::new(0.0, 0.0), 0.0);
            for j in 0..m {
                let t = formula[(k, j)] * formula_inv[(j, l)];
                sum += t;
                mag += t.norm();
            }
            let dev = (sum - if k == l { 1.0 } else { 0.0 }).norm();
            quad = quad.max(dev / mag.max(1.0));
            if k == l {
                quad_diag = quad_diag.max(dev);
            }
        }
    }
    Ok(CheckAResidual {
        a_check: ScaledResidual { residual: (&numeric - &formula).frobenius_norm(), scale: numeric.frobenius_norm() },
        a_check_inverse: ScaledResidual {
            residual: (&numeric_inv - &formula_inv).frobenius_norm(),
            scale: numeric_inv.frobenius_norm(),
        },
        quad_eqn_diagonal: quad_diag,
        quad_eqn: quad,
    })
}

/// Free asymptotics `q_c(t) ≈ q_c^± + t p_c^±` for `t → ±∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticData {
    pub q_plus: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub p_minus: Vec<f64>,
}

/// `½ Σ_{a<c} ln(1 − (x_c − x_a)⁻²)`.
fn correction(x: &[C64], c: usize) -> f64 {
    (0..c).map(|a| 0.5 * (ONE - (x[c] - x[a]).powi(-2)).re.ln()).sum()
}

/// Closed-form asymptotic phases and momenta of the frame.
pub fn asymptotic_data(frame: &SpectralFrame) -> Result<AsymptoticData> {
    if !is_strictly_decreasing_positive(&frame.lambda) {
        return Err(Error::DegenerateLambda);
    }
    let n = frame.n();
    let x = &frame.x[..n];
    Ok(AsymptoticData {
        q_plus: (0..n).map(|c| frame.f[c].abs().ln() - correction(x, c)).collect(),
        p_plus: frame.lambda.clone(),
        q_minus: (0..n).map(|c| frame.h[c].norm().ln() - correction(x, c)).collect(),
        p_minus: frame.lambda.iter().map(|l| -l).collect(),
    })
}

/// `δ(p, μ) = ½ ln(1 + 4μ²/p²)`.
pub fn delta(p: f64, mu: f64) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    Ok(0.5 * (4.0 * mu * mu / (p * p)).ln_1p())
}

/// Per-particle deviation from the factorized phase-shift identity.
pub fn theorem3_residual(asym: &AsymptoticData, cp: &CouplingParams) -> Result<Vec<f64>> {
    let n = asym.p_minus.len();
    let pm = &asym.p_minus;
    let g = cp.g();
    (0..n)
        .map(|c| {
            let mut s = asym.q_plus[c] + asym.q_minus[c];
            for a in 0..n {
                if a < c {
                    s += delta(pm[c] - pm[a], g)?;
                } else if a > c {
                    s -= delta(pm[c] - pm[a], g)?;
                }
                if a != c {
                    s -= delta(pm[c] + pm[a], g)?;
                }
            }
            s -= delta(2.0 * pm[c], cp.g2())?;
            Ok(s.abs())
        })
        .collect()
}

/// Least-squares lines through the positions over one time window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    /// Intercepts `q_c^±`.
    pub q: Vec<f64>,
    /// Slopes `p_c^±`.
    pub p: Vec<f64>,
    /// Root-mean-square fit residual per particle.
    pub rms: Vec<f64>,
}

impl AsymptoticFit {
    pub fn max_rms(&self) -> f64 {
        self.rms.iter().copied().fold(0.0, f64::max)
    }
}

/// Fits `q_c(t) ≈ a + b t` over the samples with `t ∈ [window.0, window.1]`.
pub fn fit_asymptotics(traj: &Trajectory, window: (f64, f64)) -> Result<AsymptoticFit> {
    let idx: Vec<usize> = (0..traj.len()).filter(|&k| traj.times[k] >= window.0 && traj.times[k] <= window.1).collect();
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::WindowTooSmall { samples: idx.len(), required: MIN_FIT_SAMPLES });
    }
    let m = idx.len() as f64;
    let t_mean = idx.iter().map(|&k| traj.times[k]).sum::<f64>() / m;
    let stt: f64 = idx.iter().map(|&k| (traj.times[k] - t_mean).powi(2)).sum();
    let n = traj.points[0].n();
    let mut fit = AsymptoticFit { q: Vec::with_capacity(n), p: Vec::with_capacity(n), rms: Vec::with_capacity(n) };
    for c in 0..n {
        let y_mean = idx.iter().map(|&k| traj.points[k].q()[c]).sum::<f64>() / m;
        let sty: f64 = idx.iter().map(|&k| (traj.times[k] - t_mean) * (traj.points[k].q()[c] - y_mean)).sum();
        let b = sty / stt;
        let a = y_mean - b * t_mean;
        let ss: f64 = idx.iter().map(|&k| (traj.points[k].q()[c] - a - b * traj.times[k]).powi(2)).sum();
        fit.q.push(a);
        fit.p.push(b);
        fit.rms.push((ss / m).sqrt());
    }
    Ok(fit)
}

impl AsymptoticData {
    pub fn from_fits(plus: &AsymptoticFit, minus: &AsymptoticFit) -> Self {
        Self { q_plus: plus.q.clone(), p_plus: plus.p.clone(), q_minus: minus.q.clone(), p_minus: minus.p.clone() }
    }
}
