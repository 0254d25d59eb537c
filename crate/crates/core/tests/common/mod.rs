#![allow(dead_code)]

use rand::Rng;
use sutherland_core::{CouplingParams, PhasePoint};

/// Couplings in `[−2, 2]` away from zero and from `g₂ = 2g`.
pub fn random_couplings<R: Rng>(rng: &mut R) -> CouplingParams {
    loop {
        let g: f64 = rng.random_range(-2.0..2.0);
        let g2: f64 = rng.random_range(-2.0..2.0);
        if g.abs() < 0.2 || g2.abs() < 0.2 || (g2 - 2.0 * g).abs() < 0.1 {
            continue;
        }
        return CouplingParams::new(g, g2).unwrap();
    }
}

/// Chamber point with `q_n ∈ [0.2, 1]`, gaps in `[0.3, 1.2]`, `|p_c| ≤ 1.5`.
pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> PhasePoint {
    let mut q = vec![0.0; n];
    q[n - 1] = rng.random_range(0.2..1.0);
    for c in (0..n - 1).rev() {
        q[c] = q[c + 1] + rng.random_range(0.3..1.2);
    }
    let p = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
    PhasePoint::new(q, p).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
