//! Lax matrices of the Sutherland system.
//!
//! All functions of `ad_Q` act entrywise because `Q` is diagonal:
//! `f(ad_Q) X` has entries `f(Q_kk − Q_ll) X_kl`, restricted to the
//! off-diagonal part.

use crate::error::{Error, Result};
use crate::matrixkit::{c_matrix, outer, ComplexMatrix, C64, I, ZERO};
use crate::model::{CouplingParams, PhasePoint, Trajectory};
use crate::ScaledResidual;

/// Diagonal of `Q = diag(q, −q)`.
pub fn q_diagonal(q: &[f64]) -> Vec<f64> {
    q.iter().copied().chain(q.iter().map(|x| -x)).collect()
}

/// The column vector `E` with `E_a = 1`, `E_{n+a} = −1`.
pub fn e_vector(n: usize) -> Vec<C64> {
    (0..2 * n).map(|k| if k < n { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) }).collect()
}

/// `e^{sQ}` as a diagonal matrix.
pub fn exp_q(q: &[f64], s: f64) -> ComplexMatrix {
    let d: Vec<f64> = q_diagonal(q).iter().map(|x| (s * x).exp()).collect();
    ComplexMatrix::from_real_diag(&d)
}

/// `e^{Q} E`.
pub fn exp_q_e(q: &[f64]) -> Vec<C64> {
    let n = q.len();
    q_diagonal(q).iter().zip(e_vector(n)).map(|(x, e)| e * x.exp()).collect()
}

/// `ξ = i g (E E* − 1) + i (g − g₂) C`.
pub fn build_xi(cp: &CouplingParams, n: usize) -> ComplexMatrix {
    let e = e_vector(n);
    let c = c_matrix(n);
    let ig = I * cp.g();
    let igc = I * (cp.g() - cp.g2());
    ComplexMatrix::from_fn(2 * n, 2 * n, |k, l| {
        let delta = if k == l { 1.0 } else { 0.0 };
        ig * (e[k] * e[l].conj() - delta) + igc * c[(k, l)]
    })
}

fn off_diagonal_map(
    pp: &PhasePoint,
    xi: &ComplexMatrix,
    diag: impl Fn(usize) -> C64,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix> {
    let qd = q_diagonal(pp.q());
    let n2 = qd.len();
    let mut m = ComplexMatrix::zeros(n2, n2);
    for k in 0..n2 {
        for l in 0..n2 {
            m[(k, l)] = if k == l {
                diag(k)
            } else {
                let v = f(qd[k] - qd[l]);
                if !v.is_finite() {
                    return Err(Error::OutOfChamber);
                }
                xi[(k, l)] * v
            };
        }
    }
    Ok(m)
}

fn p_entry(pp: &PhasePoint, k: usize) -> C64 {
    let n = pp.n();
    if k < n {
        C64::new(pp.p()[k], 0.0)
    } else {
        C64::new(-pp.p()[k - n], 0.0)
    }
}

/// `𝓛 = P − coth(ad_Q) ξ` with a caller-supplied `ξ`.
pub fn build_cal_l_with_xi(pp: &PhasePoint, xi: &ComplexMatrix) -> Result<ComplexMatrix> {
    off_diagonal_map(pp, xi, |k| p_entry(pp, k), |x| -1.0 / x.tanh())
}

pub fn build_cal_l(pp: &PhasePoint, cp: &CouplingParams) -> Result<ComplexMatrix> {
    build_cal_l_with_xi(pp, &build_xi(cp, pp.n()))
}

/// The diagonal functions `φ_c` entering `B`.
pub fn phi(pp: &PhasePoint, cp: &CouplingParams) -> Vec<f64> {
    let q = pp.q();
    let n = q.len();
    let s2 = |x: f64| 1.0 / x.sinh().powi(2);
    (0..n)
        .map(|c| {
            let pair: f64 = (0..n).filter(|&a| a != c).map(|a| s2(q[c] - q[a]) + s2(q[c] + q[a])).sum();
            -cp.g() * pair - cp.g2() * s2(2.0 * q[c])
        })
        .collect()
}

/// `B = Φ + sinh(ad_Q)⁻² ξ`.
pub fn build_b(pp: &PhasePoint, cp: &CouplingParams) -> Result<ComplexMatrix> {
    let n = pp.n();
    let phi = phi(pp, cp);
    let xi = build_xi(cp, n);
    off_diagonal_map(pp, &xi, |k| I * phi[k % n], |x| 1.0 / x.sinh().powi(2))
}

/// `L = P − sinh(ad_Q)⁻¹ ξ` with a caller-supplied `ξ`.
pub fn build_l_with_xi(pp: &PhasePoint, xi: &ComplexMatrix) -> Result<ComplexMatrix> {
    off_diagonal_map(pp, xi, |k| p_entry(pp, k), |x| -1.0 / x.sinh())
}

pub fn build_l(pp: &PhasePoint, cp: &CouplingParams) -> Result<ComplexMatrix> {
    build_l_with_xi(pp, &build_xi(cp, pp.n()))
}

/// The Lax data at one phase point.
#[derive(Clone, Debug)]
pub struct LaxData {
    pub q: ComplexMatrix,
    pub p: ComplexMatrix,
    pub xi: ComplexMatrix,
    pub cal_l: ComplexMatrix,
    pub b: ComplexMatrix,
    pub l: ComplexMatrix,
}

impl LaxData {
    pub fn new(pp: &PhasePoint, cp: &CouplingParams) -> Result<Self> {
        let n = pp.n();
        let p: Vec<f64> = (0..2 * n).map(|k| p_entry(pp, k).re).collect();
        Ok(Self {
            q: ComplexMatrix::from_real_diag(&q_diagonal(pp.q())),
            p: ComplexMatrix::from_real_diag(&p),
            xi: build_xi(cp, n),
            cal_l: build_cal_l(pp, cp)?,
            b: build_b(pp, cp)?,
            l: build_l(pp, cp)?,
        })
    }
}

/// Hermitian and anticommuting with `C`.
pub fn in_u_nn_minus(x: &ComplexMatrix, tol: f64) -> bool {
    let c = c_matrix(x.rows() / 2);
    x.is_hermitian(tol) && x.anticommutator(&c).frobenius_norm() <= tol
}

/// Anti-Hermitian and `X* C + C X = 0`.
pub fn in_u_nn_plus(x: &ComplexMatrix, tol: f64) -> bool {
    let c = c_matrix(x.rows() / 2);
    x.is_anti_hermitian(tol) && (&(&x.adjoint() * &c) + &(&c * x)).frobenius_norm() <= tol
}

/// Central-difference check of `𝓛̇ = [𝓛, B]` along a sampled trajectory.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LaxResidual {
    /// `max_t ‖Δ𝓛/Δt − [𝓛, B]‖_F`.
    pub max_abs: f64,
    /// Same, each sample divided by `‖𝓛(t)‖_F`.
    pub max_rel: f64,
}

pub fn lax_residual(traj: &Trajectory, cp: &CouplingParams) -> Result<LaxResidual> {
    let m = traj.len();
    if m < 3 {
        return Err(Error::GridTooCoarse { samples: m });
    }
    let dt = traj.times[1] - traj.times[0];
    let uniform = traj.times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
    if !uniform || dt == 0.0 {
        return Err(Error::NonUniformGrid);
    }
    let cal: Vec<ComplexMatrix> = traj.points.iter().map(|pp| build_cal_l(pp, cp)).collect::<Result<_>>()?;
    let mut out = LaxResidual { max_abs: 0.0, max_rel: 0.0 };
    for k in 1..m - 1 {
        let deriv = (&cal[k + 1] - &cal[k - 1]).scale(C64::new(1.0 / (2.0 * dt), 0.0));
        let b = build_b(&traj.points[k], cp)?;
        let r = (&deriv - &cal[k].commutator(&b)).frobenius_norm();
        out.max_abs = out.max_abs.max(r);
        out.max_rel = out.max_rel.max(r / cal[k].frobenius_norm());
    }
    Ok(out)
}

fn commutation_with_l(pp: &PhasePoint, cp: &CouplingParams, l: &ComplexMatrix) -> ScaledResidual {
    let n = pp.n();
    let a = exp_q(pp.q(), 2.0);
    let v = exp_q_e(pp.q());
    let c = c_matrix(n);
    let ig = I * cp.g();
    let lhs = &(&a.scale(2.0 * ig) + &(l * &a)) - &(&a * l);
    let rhs = &outer(&v, &v).scale(2.0 * ig) + &c.scale(2.0 * I * (cp.g() - cp.g2()));
    let residual = (&lhs - &rhs).frobenius_norm();
    let scale = 2.0 * cp.g().abs() * a.frobenius_norm()
        + 2.0 * l.frobenius_norm() * a.frobenius_norm()
        + 2.0 * cp.g().abs() * v.iter().map(|z| z.norm_sqr()).sum::<f64>()
        + 2.0 * (cp.g() - cp.g2()).abs() * (2.0 * n as f64).sqrt();
    ScaledResidual { residual, scale }
}

/// Residual of `2ig A + LA − AL = 2ig (e^Q E)(e^Q E)* + 2i(g − g₂) C` with
/// `A = e^{2Q}`.
pub fn commutation_residual(pp: &PhasePoint, cp: &CouplingParams) -> Result<ScaledResidual> {
    Ok(commutation_with_l(pp, cp, &build_l(pp, cp)?))
}

/// Same identity with `L` built from `(1 + δ) ξ`; a negative control.
pub fn commutation_residual_perturbed(pp: &PhasePoint, cp: &CouplingParams, delta: f64) -> Result<ScaledResidual> {
    let xi = build_xi(cp, pp.n()).scale(C64::new(1.0 + delta, 0.0));
    Ok(commutation_with_l(pp, cp, &build_l_with_xi(pp, &xi)?))
}

/// `‖sinh(ad_Q) L + ξ‖_F`.
pub fn sinh_ad_residual(pp: &PhasePoint, cp: &CouplingParams) -> Result<f64> {
    let l = build_l(pp, cp)?;
    let xi = build_xi(cp, pp.n());
    let qd = q_diagonal(pp.q());
    let s = ComplexMatrix::from_fn(
        l.rows(),
        l.cols(),
        |k, m| {
            if k == m {
                ZERO
            } else {
                l[(k, m)] * (qd[k] - qd[m]).sinh()
            }
        },
    );
    Ok((&s + &xi).frobenius_norm())
}
