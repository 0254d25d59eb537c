//! Adaptive Dormand–Prince 5(4) integration of the Sutherland flow.
//!
//! Steps are clipped so that every output grid point is hit exactly; the
//! trajectory therefore carries no interpolation error.

use serde::{Deserialize, Serialize};

use super::{forces, hamiltonian, CouplingParams, PhasePoint};
use crate::error::{Error, Result};
use crate::tolerances::{DEFAULT_ABS_TOL, DEFAULT_ENERGY_DRIFT, DEFAULT_REL_TOL, MIN_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `|H(t) − H(0)| ≤ energy_drift_bound · max(1, |H(0)|)` is enforced.
    pub energy_drift_bound: f64,
    /// Number of uniformly spaced output samples, both endpoints included.
    pub grid_points: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            energy_drift_bound: DEFAULT_ENERGY_DRIFT,
            grid_points: 201,
        }
    }
}

impl IntegratorOptions {
    /// Grid with spacing at most `dt` over `[0, t_final]`.
    pub fn with_spacing(mut self, t_final: f64, dt: f64) -> Self {
        self.grid_points = ((t_final.abs() / dt).round() as usize).max(1) + 1;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidOptions("tolerances must be positive"));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidOptions("grid_points must be at least 2"));
        }
        if self.energy_drift_bound.is_nan() || self.energy_drift_bound < 0.0 {
            return Err(Error::InvalidOptions("energy_drift_bound must be non-negative"));
        }
        Ok(())
    }
}

/// Samples of a solution on a uniform time grid, times strictly increasing.
/// A backward run over `[t_final, 0]` ends at `t = 0`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn origin_index(&self) -> usize {
        if self.times[0] == 0.0 {
            0
        } else {
            self.len() - 1
        }
    }

    /// The sample at `t_final`, the end point of the integration.
    pub fn final_point(&self) -> &PhasePoint {
        if self.origin_index() == 0 {
            self.points.last().expect("trajectory is never empty")
        } else {
            &self.points[0]
        }
    }

    /// `max_t |H(t) − H(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.energies[self.origin_index()];
        self.energies.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max)
    }

    /// Position of particle `c` along the trajectory.
    pub fn positions(&self, c: usize) -> Vec<f64> {
        self.points.iter().map(|pp| pp.q()[c]).collect()
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// fifth-order weights, also the last stage row (FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 50_000_000;

/// Generic embedded Dormand–Prince stepper over `y' = f(y)` (autonomous).
pub(crate) struct Dopri5<F> {
    rhs: F,
    rel_tol: f64,
    abs_tol: f64,
    dim: usize,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
}

enum StepOutcome {
    Accepted {
        err: f64,
    },
    Rejected {
        err: f64,
    },
    /// A stage left the domain of the right-hand side.
    OutOfDomain,
}

impl<F> Dopri5<F>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    pub(crate) fn new(rhs: F, dim: usize, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rhs,
            rel_tol,
            abs_tol,
            dim,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }

    fn weighted_rms(&self, v: &[f64], y: &[f64]) -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(e, x)| {
                let sc = self.abs_tol + self.rel_tol * x.abs();
                (e / sc).powi(2)
            })
            .sum();
        (s / self.dim as f64).sqrt()
    }

    fn initial_step(&mut self, y: &[f64], direction: f64) -> Result<f64> {
        let d0 = self.weighted_rms(y, y);
        let d1 = self.weighted_rms(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        for i in 0..self.dim {
            self.stage[i] = y[i] + direction * h0 * self.k[0][i];
        }
        let mut f1 = vec![0.0; self.dim];
        if (self.rhs)(&self.stage, &mut f1).is_err() {
            return Ok(h0 * 0.1);
        }
        let diff: Vec<f64> = f1.iter().zip(&self.k[0]).map(|(a, b)| a - b).collect();
        let d2 = self.weighted_rms(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        Ok((100.0 * h0).min(h1))
    }

    /// One trial step of signed size `h` from `y`; `k[0]` must hold `f(y)`.
    fn try_step(&mut self, y: &[f64], h: f64) -> StepOutcome {
        let n = self.dim;
        macro_rules! stage {
            ($dst:expr, $($coef:expr => $src:expr),+) => {{
                for i in 0..n {
                    self.stage[i] = y[i] + h * (0.0 $(+ $coef * self.k[$src][i])+);
                }
                let mut out = std::mem::take(&mut self.k[$dst]);
                let r = (self.rhs)(&self.stage, &mut out);
                self.k[$dst] = out;
                if r.is_err() {
                    return StepOutcome::OutOfDomain;
                }
            }};
        }
        stage!(1, A21 => 0);
        stage!(2, A31 => 0, A32 => 1);
        stage!(3, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (B1 * self.k[0][i]
                    + B3 * self.k[2][i]
                    + B4 * self.k[3][i]
                    + B5 * self.k[4][i]
                    + B6 * self.k[5][i]);
        }
        let mut out = std::mem::take(&mut self.k[6]);
        let r = (self.rhs)(&self.y_new, &mut out);
        self.k[6] = out;
        if r.is_err() {
            return StepOutcome::OutOfDomain;
        }
        let mut s = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(self.y_new[i].abs());
            s += (e / sc).powi(2);
        }
        let err = (s / n as f64).sqrt();
        if err <= 1.0 {
            StepOutcome::Accepted { err }
        } else {
            StepOutcome::Rejected { err }
        }
    }

    /// Advances `y` from `t0` through every time in `targets` (monotone in the
    /// direction of travel), calling `emit` at each.
    pub(crate) fn run(
        &mut self,
        t0: f64,
        y0: &[f64],
        targets: &[f64],
        mut emit: impl FnMut(f64, &[f64]) -> Result<()>,
    ) -> Result<()> {
        let Some(&t_end) = targets.last() else {
            return Ok(());
        };
        let direction = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut y = y0.to_vec();
        let mut t = t0;
        let mut f0 = std::mem::take(&mut self.k[0]);
        (self.rhs)(&y, &mut f0)?;
        self.k[0] = f0;
        let mut h = self.initial_step(&y, direction)?;
        let mut steps = 0usize;

        for &target in targets {
            while (target - t) * direction > 0.0 {
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::StepUnderflow { t, h });
                }
                let remaining = (target - t).abs();
                let clipped = h >= remaining;
                let h_try = if clipped { remaining } else { h };
                match self.try_step(&y, direction * h_try) {
                    StepOutcome::Accepted { err } => {
                        t = if clipped { target } else { t + direction * h_try };
                        std::mem::swap(&mut y, &mut self.y_new);
                        self.k.swap(0, 6);
                        let factor = if err == 0.0 {
                            MAX_FACTOR
                        } else {
                            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                        };
                        let proposal = h_try * factor;
                        h = if clipped { h.max(proposal) } else { proposal };
                    }
                    StepOutcome::Rejected { err } => {
                        h = h_try * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                        if h < MIN_STEP {
                            return Err(Error::StepUnderflow { t, h });
                        }
                    }
                    StepOutcome::OutOfDomain => {
                        h = h_try * 0.25;
                        if h < MIN_STEP {
                            return Err(Error::ChamberExit { t });
                        }
                    }
                }
            }
            emit(t, &y)?;
        }
        Ok(())
    }
}

/// Integrates the Sutherland flow from `pp0` over `[0, t_final]` (or
/// `[t_final, 0]` for negative `t_final`) and samples it on a uniform grid.
pub fn integrate(pp0: &PhasePoint, cp: &CouplingParams, t_final: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    opts.validate()?;
    if !t_final.is_finite() {
        return Err(Error::InvalidOptions("t_final must be finite"));
    }
    let h0 = hamiltonian(pp0, cp)?;
    let mut traj = Trajectory { times: vec![0.0], points: vec![pp0.clone()], energies: vec![h0] };
    if t_final == 0.0 {
        return Ok(traj);
    }
    let n = pp0.n();
    let m = opts.grid_points;
    let targets: Vec<f64> =
        (1..m).map(|k| if k == m - 1 { t_final } else { t_final * k as f64 / (m - 1) as f64 }).collect();

    let cp_copy = *cp;
    let rhs = move |y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (q, p) = y.split_at(n);
        let (dq, dp) = dy.split_at_mut(n);
        dq.copy_from_slice(p);
        forces(q, &cp_copy, dp)
    };
    let mut y0 = pp0.q().to_vec();
    y0.extend_from_slice(pp0.p());

    let mut stepper = Dopri5::new(rhs, 2 * n, opts.rel_tol, opts.abs_tol);
    stepper.run(0.0, &y0, &targets, |t, y| {
        let pp = PhasePoint::new(y[..n].to_vec(), y[n..].to_vec()).map_err(|_| Error::ChamberExit { t })?;
        traj.energies.push(hamiltonian(&pp, cp)?);
        traj.times.push(t);
        traj.points.push(pp);
        Ok(())
    })?;

    if t_final < 0.0 {
        traj.times.reverse();
        traj.points.reverse();
        traj.energies.reverse();
    }
    let drift = traj.energy_drift();
    let bound = opts.energy_drift_bound * h0.abs().max(1.0);
    if drift > bound {
        return Err(Error::EnergyDrift { drift, bound });
    }
    Ok(traj)
}
