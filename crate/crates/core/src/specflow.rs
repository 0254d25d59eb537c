//! Positions from the exponential matrix flow.
//!
//! The eigenvalues of `e^{Q(0)} e^{2tL} e^{Q(0)}` are `e^{±2 q_c(t)}`.

use crate::error::{Error, Result};
use crate::lax::{build_l, exp_q};
use crate::matrixkit::{hermitian_eigen, singular_values_jacobi, ComplexMatrix, HermitianEigen};
use crate::model::{integrate, CouplingParams, IntegratorOptions, PhasePoint};
use crate::tolerances::{EIG_TOL, PAIRING_REL};

/// The flow matrix at one instant together with the positions read off it.
#[derive(Clone, Debug)]
pub struct FlowSnapshot {
    pub t: f64,
    pub flow_matrix: ComplexMatrix,
    pub recovered_q: Vec<f64>,
}

impl FlowSnapshot {
    pub fn new(pp0: &PhasePoint, cp: &CouplingParams, t: f64) -> Result<Self> {
        Ok(Self { t, flow_matrix: flow_matrix(pp0, cp, t)?, recovered_q: flow_positions(pp0, cp, t)? })
    }
}

fn l_eigen(pp0: &PhasePoint, cp: &CouplingParams) -> Result<HermitianEigen> {
    hermitian_eigen(&build_l(pp0, cp)?, EIG_TOL)
}

/// `e^{Q} e^{2tL} e^{Q}` with the exponential taken through the spectrum of `L`.
pub fn flow_matrix(pp0: &PhasePoint, cp: &CouplingParams, t: f64) -> Result<ComplexMatrix> {
    let eq = exp_q(pp0.q(), 1.0);
    let e2tl = l_eigen(pp0, cp)?.apply_function(|x| (2.0 * t * x).exp());
    let y = &(&eq * &e2tl) * &eq;
    // restore exact Hermiticity lost to rounding
    let n = y.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (y[(i, j)] + y[(j, i)].conj())))
}

/// Positions `q(t)` in descending order.
///
/// With `L = V Λ V*` the flow matrix is `K K*` for `K = e^{Q} V e^{tΛ}`, so
/// `e^{q_c(t)}` are the singular values of `K`. These are obtained by
/// one-sided Jacobi, which keeps the small singular values accurate even when
/// the spectrum of the flow matrix spans many orders of magnitude.
pub fn flow_positions(pp0: &PhasePoint, cp: &CouplingParams, t: f64) -> Result<Vec<f64>> {
    let n = pp0.n();
    let eig = l_eigen(pp0, cp)?;
    let eq = exp_q(pp0.q(), 1.0);
    let scale: Vec<f64> = eig.eigenvalues.iter().map(|l| (t * l).exp()).collect();
    let v = &eq * &eig.vectors;
    let k = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| v[(i, j)] * scale[j]);
    let sv = singular_values_jacobi(&k)?;
    if sv.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(Error::PairingViolation { deviation: f64::INFINITY });
    }
    let deviation = (0..n).map(|c| (sv[c] * sv[2 * n - 1 - c] - 1.0).abs()).fold(0.0, f64::max);
    if deviation > PAIRING_REL {
        return Err(Error::PairingViolation { deviation });
    }
    Ok((0..n).map(|c| 0.5 * (sv[c].ln() - sv[2 * n - 1 - c].ln())).collect())
}

/// `max_t ‖flow_positions(t) − q(t)‖_∞` against the integrated trajectory.
pub fn flow_vs_ode_residual(
    pp0: &PhasePoint,
    cp: &CouplingParams,
    t_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let q_ode = if t == 0.0 {
            pp0.q().to_vec()
        } else {
            let o = IntegratorOptions { grid_points: 2, ..*opts };
            integrate(pp0, cp, t, &o)?.final_point().q().to_vec()
        };
        let q_flow = flow_positions(pp0, cp, t)?;
        let d = q_ode.iter().zip(&q_flow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Same residual against one integrated trajectory, sampled at its own grid.
pub fn flow_vs_trajectory_residual(
    pp0: &PhasePoint,
    cp: &CouplingParams,
    traj: &crate::model::Trajectory,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (t, pp) in traj.times.iter().zip(&traj.points) {
        let q_flow = flow_positions(pp0, cp, *t)?;
        let d = pp.q().iter().zip(&q_flow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Sorted eigenvalues of the dense flow matrix, for moderate `t`.
pub fn flow_spectrum(pp0: &PhasePoint, cp: &CouplingParams, t: f64) -> Result<Vec<f64>> {
    let y = flow_matrix(pp0, cp, t)?;
    Ok(hermitian_eigen(&y, EIG_TOL)?.eigenvalues)
}
