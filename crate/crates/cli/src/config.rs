use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sutherland_core::tolerances::{DEFAULT_FIT_WINDOW_FRACTION, DEFAULT_SCATTER_T};
use sutherland_core::{CouplingParams, IntegratorOptions, PhasePoint};

use crate::CliError;

/// One experiment as read from a JSON config file.
///
/// `q0` and `p0` may be omitted together, in which case a chamber point is
/// drawn from `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub g: f64,
    pub g2: f64,
    pub q0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub t_final: f64,
    pub integrator: IntegratorOptions,
    /// Also compute the finite-difference Lax residual in `simulate`.
    pub lax_residual: bool,
    /// Sample spacing for the Lax residual.
    pub lax_dt: f64,
    /// Fraction of `[0, T]` left out at the start of each fit window.
    pub fit_window_fraction: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            g: 1.0,
            g2: 1.5,
            q0: Some(vec![1.6, 0.7]),
            p0: Some(vec![-0.4, 0.3]),
            t_final: DEFAULT_SCATTER_T,
            integrator: IntegratorOptions::default(),
            lax_residual: false,
            lax_dt: 1e-3,
            fit_window_fraction: DEFAULT_FIT_WINDOW_FRACTION,
            seed: 0,
        }
    }
}

/// A config whose couplings and initial point have been checked.
#[derive(Clone, Debug)]
pub struct Validated {
    pub config: RunConfig,
    pub couplings: CouplingParams,
    pub initial: PhasePoint,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))
    }

    pub fn validate(self) -> Result<Validated, CliError> {
        let invalid = |msg: String| Err(CliError::ConfigInvalid(msg));
        let couplings = CouplingParams::new(self.g, self.g2).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        if self.n == 0 {
            return invalid("n must be at least 1".into());
        }
        if !self.t_final.is_finite() {
            return invalid("t_final must be finite".into());
        }
        if self.lax_dt.is_nan() || self.lax_dt <= 0.0 {
            return invalid("lax_dt must be positive".into());
        }
        if self.fit_window_fraction.is_nan() || self.fit_window_fraction <= 0.0 || self.fit_window_fraction >= 1.0 {
            return invalid("fit_window_fraction must lie in (0, 1)".into());
        }
        let (q, p) = match (&self.q0, &self.p0) {
            (Some(q), Some(p)) => (q.clone(), p.clone()),
            (None, None) => random_point(self.seed, self.n),
            _ => return invalid("q0 and p0 must be given together".into()),
        };
        if q.len() != self.n || p.len() != self.n {
            return invalid(format!("q0 and p0 must have length n = {}", self.n));
        }
        let initial = PhasePoint::new(q, p).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        Ok(Validated { config: self, couplings, initial })
    }
}

/// `q_n ∈ [0.3, 1.2]`, gaps in `[0.5, 1.5]`, `|p_c| ≤ 1`.
fn random_point(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![0.0; n];
    q[n - 1] = rng.random_range(0.3..1.2);
    for c in (0..n - 1).rev() {
        q[c] = q[c + 1] + rng.random_range(0.5..1.5);
    }
    let p = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (q, p)
}
