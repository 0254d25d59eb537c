//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, random_couplings, random_point};
use sutherland_core::dual::{
    build_dual_lax, dual_consistency_residual, energy_duality_residual, rsvd_hamiltonian, rsvd_hamiltonian_trace,
};
use sutherland_core::lax::{build_l, commutation_residual, lax_residual};
use sutherland_core::matrixkit::{c_matrix, determinant, hermitian_eigen, suites};
use sutherland_core::model::integrate;
use sutherland_core::scattering::{
    asymptotic_data, check_a_entries_residual, fit_asymptotics, spectral_frame, theorem3_residual, z_closed_form,
    z_linear_residual, z_quadratic_residual,
};
use sutherland_core::specflow::flow_vs_trajectory_residual;
use sutherland_core::tolerances::*;
use sutherland_core::{
    AsymptoticData, ComplexMatrix, CouplingParams, DualCoordinates, Error, IntegratorOptions, PhasePoint, SpectralFrame,
};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

fn spectrum(pp: &PhasePoint, cp: &CouplingParams) -> Vec<f64> {
    hermitian_eigen(&build_l(pp, cp).unwrap(), EIG_TOL).unwrap().eigenvalues
}

fn criterion_1() -> Check {
    let mut rng = rng(1);
    let (mut worst_rel, mut worst_spec) = (0.0f64, 0.0f64);
    let mut worst_case = None;
    let mut slowest = Duration::ZERO;
    for i in 0..20 {
        let n = 1 + i % 4;
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, n);
        let start = Instant::now();
        let lam0 = spectrum(&pp, &cp);
        let scale = lam0[0].abs().max(1.0);
        for t_final in [20.0, -20.0] {
            let opts = IntegratorOptions::default().with_spacing(20.0, 1e-3);
            let traj = integrate(&pp, &cp, t_final, &opts).map_err(|e| format!("case {i}: {e}"))?;
            let r = lax_residual(&traj, &cp).map_err(|e| e.to_string())?;
            if r.max_rel > worst_rel {
                worst_rel = r.max_rel;
                worst_case = Some((cp, pp.clone(), t_final));
            }
            for point in traj.points.iter().step_by(50) {
                worst_spec = worst_spec.max(max_abs_diff(&spectrum(point, &cp), &lam0) / scale);
            }
        }
        slowest = slowest.max(start.elapsed());
    }
    // the worst case rerun at half the spacing shows the order of the residual
    let (cp, pp, t_final) = worst_case.expect("at least one case");
    let opts = IntegratorOptions::default().with_spacing(20.0, 5e-4);
    let traj = integrate(&pp, &cp, t_final, &opts).map_err(|e| e.to_string())?;
    let halved = lax_residual(&traj, &cp).map_err(|e| e.to_string())?.max_rel;
    let detail = format!(
        "20 cases: max Lax residual {worst_rel:.2e}·‖𝓛‖ (bound {LAX_RESIDUAL_REL_BOUND:.0e}; \
         {halved:.2e} at Δt/2, ratio {:.2}), max spectral drift {worst_spec:.2e} (bound 1e-8), slowest case {:.1}s",
        worst_rel / halved,
        slowest.as_secs_f64()
    );
    ensure(worst_rel <= LAX_RESIDUAL_REL_BOUND && worst_spec <= 1e-8 && slowest < Duration::from_secs(60), detail)
}

fn criterion_2() -> Check {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for i in 0..12 {
        let n = 1 + i % 4;
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, n);
        for t_final in [10.0, -10.0] {
            let opts = IntegratorOptions::default().with_spacing(10.0, 0.05);
            let traj = integrate(&pp, &cp, t_final, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(flow_vs_trajectory_residual(&pp, &cp, &traj).map_err(|e| e.to_string())?);
        }
    }
    ensure(
        worst <= FLOW_VS_ODE_BOUND,
        format!("12 cases, |t| ≤ 10: sup-norm gap {worst:.2e} (bound {FLOW_VS_ODE_BOUND:.0e})"),
    )
}

fn criterion_3() -> Check {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, 1 + i % 4);
        let frame = spectral_frame(&pp, &cp).map_err(|e| e.to_string())?;
        let asym = asymptotic_data(&frame).map_err(|e| e.to_string())?;
        let r = theorem3_residual(&asym, &cp).map_err(|e| e.to_string())?;
        worst = worst.max(r.iter().copied().fold(0.0, f64::max));
    }
    ensure(
        worst <= THEOREM3_CLOSED_FORM_BOUND,
        format!("100 points: worst residual {worst:.2e} (bound {THEOREM3_CLOSED_FORM_BOUND:.0e})"),
    )
}

/// Random point whose smallest spectral gap among `λ_a − λ_b` and `2λ_n`
/// lies in `[lo, hi]`.
fn with_gap<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> (CouplingParams, PhasePoint, SpectralFrame) {
    loop {
        let cp = random_couplings(rng);
        let pp = random_point(rng, n);
        let Ok(frame) = spectral_frame(&pp, &cp) else { continue };
        let l = &frame.lambda;
        let min_gap = l.windows(2).map(|w| w[0] - w[1]).fold(2.0 * l[n - 1], f64::min);
        if (lo..=hi).contains(&min_gap) {
            return (cp, pp, frame);
        }
    }
}

fn two_sided_fit(pp: &PhasePoint, cp: &CouplingParams, t: f64) -> std::result::Result<AsymptoticData, Error> {
    let opts = IntegratorOptions::default().with_spacing(t, 0.01);
    let lo = DEFAULT_FIT_WINDOW_FRACTION * t;
    let plus = fit_asymptotics(&integrate(pp, cp, t, &opts)?, (lo, t))?;
    let minus = fit_asymptotics(&integrate(pp, cp, -t, &opts)?, (-t, -lo))?;
    Ok(AsymptoticData::from_fits(&plus, &minus))
}

fn criterion_4() -> Check {
    let mut rng = rng(4);
    let (mut worst_p, mut worst_20, mut worst_closed) = (0.0f64, 0.0f64, 0.0f64);
    let mut decreased = true;
    let mut notes = Vec::new();
    for n in [1, 2, 2, 3, 3, 4] {
        let (cp, pp, frame) = with_gap(&mut rng, n, 0.5, 0.6);
        let at_20 = two_sided_fit(&pp, &cp, DEFAULT_SCATTER_T).map_err(|e| e.to_string())?;
        let at_40 = two_sided_fit(&pp, &cp, 2.0 * DEFAULT_SCATTER_T).map_err(|e| e.to_string())?;
        let minus_lam: Vec<f64> = frame.lambda.iter().map(|l| -l).collect();
        worst_p = worst_p.max(max_abs_diff(&at_20.p_plus, &frame.lambda)).max(max_abs_diff(&at_20.p_minus, &minus_lam));
        let r20 = theorem3_residual(&at_20, &cp).map_err(|e| e.to_string())?.into_iter().fold(0.0, f64::max);
        let r40 = theorem3_residual(&at_40, &cp).map_err(|e| e.to_string())?.into_iter().fold(0.0, f64::max);
        worst_20 = worst_20.max(r20);
        decreased &= r40 < r20;
        let closed = asymptotic_data(&frame).map_err(|e| e.to_string())?;
        worst_closed = worst_closed
            .max(max_abs_diff(&at_20.q_plus, &closed.q_plus))
            .max(max_abs_diff(&at_20.q_minus, &closed.q_minus));
        notes.push(format!("n={n}: {r20:.1e}→{r40:.1e}"));
    }
    ensure(
        worst_p <= 1e-6 && worst_20 <= THEOREM3_FIT_BOUND && decreased,
        format!(
            "momenta {worst_p:.2e} (bound 1e-6), phase-shift residual T=20 {worst_20:.2e} (bound {THEOREM3_FIT_BOUND:.0e}), \
             T=20→40 [{}], fitted vs closed-form phases {worst_closed:.1e}",
            notes.join(", ")
        ),
    )
}

fn criterion_5() -> Check {
    let mut rng = rng(5);
    let (mut comm, mut check_a, mut quad) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, 1 + i % 4);
        comm = comm.max(commutation_residual(&pp, &cp).map_err(|e| e.to_string())?.relative());
        let frame = spectral_frame(&pp, &cp).map_err(|e| e.to_string())?;
        let r = check_a_entries_residual(&frame, &pp, &cp).map_err(|e| e.to_string())?;
        check_a = check_a.max(r.a_check.relative()).max(r.a_check_inverse.relative());
        quad = quad.max(r.quad_eqn_diagonal).max(r.quad_eqn);
    }
    ensure(
        comm <= COMMUTATION_BOUND && check_a <= CHECK_A_BOUND && quad <= QUAD_EQN_BOUND,
        format!(
            "100 points: commutation {comm:.2e} (bound {COMMUTATION_BOUND:.0e}), Ǎ entries {check_a:.2e} \
             (bound {CHECK_A_BOUND:.0e}), quadratic relations {quad:.2e} (bound {QUAD_EQN_BOUND:.0e})"
        ),
    )
}

fn criterion_6() -> Check {
    let mut rng = rng(6);
    let (mut lin, mut quad, mut branch) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, 1 + i % 4);
        let frame = spectral_frame(&pp, &cp).map_err(|e| e.to_string())?;
        lin = z_linear_residual(&frame, &cp).iter().map(|r| r.relative()).fold(lin, f64::max);
        quad = z_quadratic_residual(&frame, &cp).iter().map(|r| r.relative()).fold(quad, f64::max);
        let z = z_closed_form(&frame.lambda, &cp).map_err(|e| e.to_string())?;
        for (a, b) in z.iter().zip(&frame.z) {
            branch = branch.max((a - b).norm() / a.norm().max(1.0));
        }
    }
    ensure(
        lin <= Z_EQUATION_BOUND && quad <= Z_EQUATION_BOUND && branch <= Z_BRANCH_BOUND,
        format!(
            "100 frames: linear {lin:.2e}, quadratic {quad:.2e} (bound {Z_EQUATION_BOUND:.0e}), \
             frame vs closed form {branch:.2e} (bound {Z_BRANCH_BOUND:.0e})"
        ),
    )
}

fn random_dual<R: Rng>(rng: &mut R, n: usize) -> DualCoordinates {
    let mut lambda = vec![0.0; n];
    lambda[n - 1] = rng.random_range(0.3..1.5);
    for c in (0..n - 1).rev() {
        lambda[c] = lambda[c + 1] + rng.random_range(0.5..2.0);
    }
    let theta = (0..n).map(|_| rng.random_range(-0.75..0.75)).collect();
    DualCoordinates::new(lambda, theta).unwrap()
}

fn criterion_7() -> Check {
    let mut rng = rng(7);
    let (mut det_err, mut h_err, mut inv_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut structural = true;
    for i in 0..200 {
        let n = 1 + i % 5;
        let cp = random_couplings(&mut rng);
        let dc = random_dual(&mut rng, n);
        let a = build_dual_lax(&dc, &cp).map_err(|e| e.to_string())?;
        det_err = det_err.max((determinant(&a).map_err(|e| e.to_string())? - 1.0).norm());
        let h = rsvd_hamiltonian(&dc, &cp).map_err(|e| e.to_string())?;
        let ht = rsvd_hamiltonian_trace(&a).map_err(|e| e.to_string())?;
        h_err = h_err.max((h - ht).abs() / h);
        structural &= a.is_hermitian(1e-12 * a.frobenius_norm()) && a.is_positive_definite(0.0);
        let c = c_matrix(n);
        let inv = a.inverse().map_err(|e| e.to_string())?;
        inv_err = inv_err.max((&(&(&c * &a) * &c) - &inv).frobenius_norm() / inv.frobenius_norm());
    }
    let (mut consistency, mut energy) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let cp = random_couplings(&mut rng);
        let pp = random_point(&mut rng, 1 + i % 4);
        consistency = consistency.max(dual_consistency_residual(&pp, &cp).map_err(|e| e.to_string())?.relative());
        energy = energy.max(energy_duality_residual(&pp, &cp).map_err(|e| e.to_string())?.relative());
    }
    ensure(
        det_err <= 1e-8
            && h_err <= 1e-10
            && inv_err <= 1e-9
            && structural
            && consistency <= DUAL_CONSISTENCY_BOUND
            && energy <= 1e-9,
        format!(
            "200 draws: |det−1| {det_err:.2e} (bound 1e-8), H closed vs trace {h_err:.2e} (bound 1e-10), \
             CǍC vs Ǎ⁻¹ {inv_err:.2e}, Hermitian positive definite {structural}; 100 points: \
             consistency {consistency:.2e} (bound {DUAL_CONSISTENCY_BOUND:.0e}), energy duality {energy:.2e} (bound 1e-9)"
        ),
    )
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let report = suites::run_all(8, &[1, 2, 3, 4, 5, 6], 200).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let lines: Vec<String> =
        report.suites.iter().map(|s| format!("{} {}×{:.1e}", s.name, s.instances, s.worst_residual)).collect();
    ensure(
        report.passed && elapsed < Duration::from_secs(300),
        format!("{} in {:.1}s (bound {IDENTITY_SUITE_BOUND:.0e})", lines.join(", "), elapsed.as_secs_f64()),
    )
}

fn criterion_9() -> Check {
    let rejected =
        [(0.0, 1.0), (1.0, 0.0), (1.0, 2.0), (-0.75, -1.5)].iter().all(|&(g, g2)| CouplingParams::new(g, g2).is_err());
    let cp = CouplingParams::new(1.0, 0.5).unwrap();
    let l = ComplexMatrix::from_real_diag(&[1.5, 1.5 - 1e-12, -1.5, -1.5 + 1e-12]);
    let degenerate =
        matches!(SpectralFrame::from_lax_matrix(&l, &[2.0, 1.0], &cp), Err(Error::DegenerateSpectrum { .. }));
    let l = ComplexMatrix::from_real_diag(&[1.5, 1e-10, -1.5, -1e-10]);
    let vanishing =
        matches!(SpectralFrame::from_lax_matrix(&l, &[2.0, 1.0], &cp), Err(Error::DegenerateSpectrum { .. }));
    ensure(
        rejected && degenerate && vanishing,
        format!("g=0, g2=0, g2=2g rejected: {rejected}; near-degenerate spectrum refused: {}", degenerate && vanishing),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("Lax property and isospectrality", criterion_1),
        ("spectral identification", criterion_2),
        ("phase shifts, closed-form route", criterion_3),
        ("phase shifts, dynamical route", criterion_4),
        ("commutation relation and Ǎ entries", criterion_5),
        ("z equations and branch", criterion_6),
        ("dual Lax matrix", criterion_7),
        ("determinant identity suites", criterion_8),
        ("guard rails", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
