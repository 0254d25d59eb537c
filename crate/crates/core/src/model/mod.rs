//! The hyperbolic `C_n` Sutherland system: couplings, phase points, energy,
//! forces and time evolution.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = ½ Σ p_c² + Σ_{a<b} g² [sinh⁻²(q_a − q_b) + sinh⁻²(q_a + q_b)] + Σ_c ½ g₂² sinh⁻²(2 q_c)
//! ```
//!
//! which equals `tr(L²)/4` for the Lax matrix built in [`crate::lax`]. The
//! external-field term carries the factor ½ that makes the Lax pair, the
//! spectral identification and the phase-shift formula mutually consistent.

mod integrator;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use integrator::{integrate, IntegratorOptions, Trajectory};

/// Coupling constants `(g, g₂)` with the derived `ε = 1 − g₂/g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingParams {
    g: f64,
    g2: f64,
    epsilon: f64,
}

impl CouplingParams {
    /// Rejects `g = 0`, `g₂ = 0` and `g₂ = 2g` (equivalently `ε = ±1`).
    pub fn new(g: f64, g2: f64) -> Result<Self> {
        if !g.is_finite() || !g2.is_finite() {
            return Err(Error::InvalidCoupling("couplings must be finite"));
        }
        if g == 0.0 {
            return Err(Error::InvalidCoupling("g must be non-zero"));
        }
        if g2 == 0.0 {
            return Err(Error::InvalidCoupling("g2 must be non-zero"));
        }
        if (g2 - 2.0 * g).abs() <= 1e-12 * g.abs() {
            return Err(Error::InvalidCoupling(
                "g2 = 2g is excluded: the components of F may vanish and L may fail to be regular",
            ));
        }
        Ok(Self { g, g2, epsilon: 1.0 - g2 / g })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl<'de> Deserialize<'de> for CouplingParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            g: f64,
            g2: f64,
        }
        let raw = Raw::deserialize(d)?;
        CouplingParams::new(raw.g, raw.g2).map_err(serde::de::Error::custom)
    }
}

/// A point `(q, p)` of the phase space over the open Weyl chamber.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
        }
        if !in_weyl_chamber(&q, 0.0) || p.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfChamber);
        }
        Ok(Self { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Same positions with momenta negated.
    pub fn reversed(&self) -> Self {
        Self { q: self.q.clone(), p: self.p.iter().map(|x| -x).collect() }
    }
}

/// `q_1 > … > q_n > 0` with every gap (and `q_n` itself) larger than `margin`.
pub fn in_weyl_chamber(q: &[f64], margin: f64) -> bool {
    if q.is_empty() || q.iter().any(|x| !x.is_finite()) {
        return false;
    }
    q.windows(2).all(|w| w[0] - w[1] > margin) && q[q.len() - 1] > margin
}

#[inline]
fn inv_sinh_sq(x: f64) -> f64 {
    let s = x.sinh();
    1.0 / (s * s)
}

/// `cosh(x) / sinh³(x)`, written to stay finite when `sinh` overflows.
#[inline]
fn cosh_over_sinh_cubed(x: f64) -> f64 {
    inv_sinh_sq(x) / x.tanh()
}

pub(crate) fn potential(q: &[f64], cp: &CouplingParams) -> f64 {
    let n = q.len();
    let g_sq = cp.g * cp.g;
    let mut v = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            v += g_sq * (inv_sinh_sq(q[a] - q[b]) + inv_sinh_sq(q[a] + q[b]));
        }
        v += 0.5 * cp.g2 * cp.g2 * inv_sinh_sq(2.0 * q[a]);
    }
    v
}

pub fn hamiltonian(pp: &PhasePoint, cp: &CouplingParams) -> Result<f64> {
    let kinetic: f64 = 0.5 * pp.p.iter().map(|x| x * x).sum::<f64>();
    let v = potential(&pp.q, cp);
    if !v.is_finite() {
        return Err(Error::OutOfChamber);
    }
    Ok(kinetic + v)
}

/// `−∂H/∂q` on raw coordinates; fails outside the chamber.
pub(crate) fn forces(q: &[f64], cp: &CouplingParams, out: &mut [f64]) -> Result<()> {
    if !in_weyl_chamber(q, 0.0) {
        return Err(Error::OutOfChamber);
    }
    let n = q.len();
    let g_sq = cp.g * cp.g;
    out.iter_mut().for_each(|x| *x = 0.0);
    for a in 0..n {
        for b in a + 1..n {
            // d/du g² sinh⁻²(u) = −2 g² cosh(u)/sinh³(u)
            let minus = 2.0 * g_sq * cosh_over_sinh_cubed(q[a] - q[b]);
            let plus = 2.0 * g_sq * cosh_over_sinh_cubed(q[a] + q[b]);
            out[a] += minus + plus;
            out[b] += plus - minus;
        }
        out[a] += 2.0 * cp.g2 * cp.g2 * cosh_over_sinh_cubed(2.0 * q[a]);
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfChamber);
    }
    Ok(())
}

/// Canonical equations `(q̇, ṗ) = (p, −∂H/∂q)`.
pub fn equations_of_motion(pp: &PhasePoint, cp: &CouplingParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut dp = vec![0.0; pp.n()];
    forces(&pp.q, cp, &mut dp)?;
    Ok((pp.p.clone(), dp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(g: f64, g2: f64) -> CouplingParams {
        CouplingParams::new(g, g2).unwrap()
    }

    #[test]
    fn coupling_guard_rails() {
        assert!(CouplingParams::new(0.0, 1.0).is_err());
        assert!(CouplingParams::new(1.0, 0.0).is_err());
        assert!(CouplingParams::new(1.0, 2.0).is_err());
        assert!(CouplingParams::new(-0.5, -1.0).is_err());
        let c = cp(2.0, 1.0);
        assert_eq!(c.epsilon(), 0.5);
        // g2 = -2g is admissible: it yields the same physical couplings as 2g
        assert!(CouplingParams::new(1.0, -2.0).is_ok());
    }

    #[test]
    fn coupling_deserialization_validates() {
        let ok: CouplingParams = serde_json::from_str(r#"{"g": 1.0, "g2": 0.5}"#).unwrap();
        assert_eq!(ok.epsilon(), 0.5);
        let bad = serde_json::from_str::<CouplingParams>(r#"{"g": 1.0, "g2": 2.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn weyl_chamber_membership() {
        assert!(in_weyl_chamber(&[3.0, 2.0, 1.0], 0.0));
        assert!(!in_weyl_chamber(&[1.0, 2.0], 0.0));
        assert!(!in_weyl_chamber(&[2.0, 2.0 - 1e-9, 1.0], 1e-8));
        assert!(!in_weyl_chamber(&[1.0, -0.5], 0.0));
        assert!(PhasePoint::new(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(PhasePoint::new(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn single_particle_energy() {
        let pp = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let h = hamiltonian(&pp, &cp(1.0, 1.0)).unwrap();
        let expected = 0.5 / 2.0f64.sinh().powi(2);
        assert!((h - expected).abs() < 1e-16);
    }

    #[test]
    fn two_particle_energy_by_hand() {
        let pp = PhasePoint::new(vec![2.0, 1.0], vec![0.0, 0.0]).unwrap();
        let h = hamiltonian(&pp, &cp(1.0, 1.0)).unwrap();
        let s = |x: f64| 1.0 / x.sinh().powi(2);
        let expected = s(1.0) + s(3.0) + 0.5 * (s(4.0) + s(2.0));
        assert!((h - expected).abs() < 1e-15);
    }

    #[test]
    fn energy_is_even_in_momenta() {
        let pp = PhasePoint::new(vec![1.3, 0.4], vec![0.7, -1.1]).unwrap();
        let c = cp(0.8, -1.3);
        assert_eq!(hamiltonian(&pp, &c).unwrap(), hamiltonian(&pp.reversed(), &c).unwrap());
    }

    #[test]
    fn single_particle_force_by_hand() {
        let pp = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let (dq, dp) = equations_of_motion(&pp, &cp(1.0, 1.0)).unwrap();
        assert_eq!(dq, vec![0.0]);
        let expected = 2.0 * 2.0f64.cosh() / 2.0f64.sinh().powi(3);
        assert!((dp[0] - expected).abs() < 1e-15);
        assert!(dp[0] > 0.0);
    }

    #[test]
    fn forces_match_finite_differences() {
        let c = cp(1.2, -0.7);
        let q = vec![2.1, 1.4, 0.6];
        let pp = PhasePoint::new(q.clone(), vec![0.3, -0.2, 0.5]).unwrap();
        let (_, dp) = equations_of_motion(&pp, &c).unwrap();
        let step = 1e-6;
        for k in 0..3 {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[k] += step;
            qm[k] -= step;
            let fd = -(potential(&qp, &c) - potential(&qm, &c)) / (2.0 * step);
            assert!((fd - dp[k]).abs() < 1e-7, "k={k}: {fd} vs {}", dp[k]);
        }
    }

    #[test]
    fn far_separated_particles_stay_finite() {
        let c = cp(1.0, 1.0);
        let mut out = vec![0.0; 2];
        forces(&[400.0, 150.0], &c, &mut out).unwrap();
        assert!(out.iter().all(|f| f.is_finite() && f.abs() < 1e-200));
    }
}
