use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sutherland_core::dual::{
    build_dual_lax, dual_consistency_residual, energy_duality_residual, rsvd_hamiltonian, rsvd_hamiltonian_trace,
};
use sutherland_core::lax::{commutation_residual, commutation_residual_perturbed, lax_residual, LaxResidual};
use sutherland_core::matrixkit::determinant;
use sutherland_core::matrixkit::suites::{run_all, IdentityReport};
use sutherland_core::model::integrate;
use sutherland_core::scattering::{
    asymptotic_data, check_a_entries_residual, fit_asymptotics, spectral_frame, theorem3_residual, z_closed_form,
    z_linear_residual, z_quadratic_residual, AsymptoticData, SpectralFrame,
};
use sutherland_core::specflow::flow_vs_trajectory_residual;
use sutherland_core::tolerances::*;
use sutherland_core::{CouplingParams, DualCoordinates, IntegratorOptions, ScaledResidual, Trajectory};

use crate::config::Validated;
use crate::CliError;

/// Horizon over which `verify` compares the flow positions with the ODE.
const VERIFY_FLOW_T: f64 = 10.0;

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn worst_relative(rs: &[ScaledResidual]) -> f64 {
    worst(rs.iter().map(ScaledResidual::relative))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut buf = header.join(",");
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(buf.as_bytes()).map_err(|e| CliError::io(path, e))
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let n = traj.points[0].n();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|c| format!("q_{c}")));
    header.extend((1..=n).map(|c| format!("p_{c}")));
    header.push("energy".into());
    let rows = (0..traj.len()).map(|k| {
        let pp = &traj.points[k];
        let mut row = vec![num(traj.times[k])];
        row.extend(pp.q().iter().map(|x| num(*x)));
        row.extend(pp.p().iter().map(|x| num(*x)));
        row.push(num(traj.energies[k]));
        row
    });
    write_csv(path, &header, rows)
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub n: usize,
    pub g: f64,
    pub g2: f64,
    pub t_final: f64,
    pub samples: usize,
    pub energy_initial: f64,
    pub energy_drift: f64,
    pub energy_drift_bound: f64,
    pub lax_residual: Option<LaxResidual>,
}

pub fn simulate(v: &Validated, out: &Path) -> Result<SimulateSummary, CliError> {
    create_out(out)?;
    let cfg = &v.config;
    let traj = integrate(&v.initial, &v.couplings, cfg.t_final, &cfg.integrator)?;
    write_trajectory_csv(&out.join("trajectory.csv"), &traj)?;
    let lax = if cfg.lax_residual && cfg.t_final != 0.0 {
        let opts = cfg.integrator.with_spacing(cfg.t_final, cfg.lax_dt);
        let fine = integrate(&v.initial, &v.couplings, cfg.t_final, &opts)?;
        Some(lax_residual(&fine, &v.couplings)?)
    } else {
        None
    };
    let summary = SimulateSummary {
        n: cfg.n,
        g: cfg.g,
        g2: cfg.g2,
        t_final: cfg.t_final,
        samples: traj.len(),
        energy_initial: traj.energies[0],
        energy_drift: traj.energy_drift(),
        energy_drift_bound: cfg.integrator.energy_drift_bound,
        lax_residual: lax,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// The scattering report of one route.
#[derive(Debug, Serialize)]
pub struct ScatterRoute {
    pub lambda: Vec<f64>,
    pub q_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    pub z_re: Vec<f64>,
    pub z_im: Vec<f64>,
    pub theta: Vec<f64>,
    pub theorem3_residual: Vec<f64>,
    pub fit_rms: Option<Vec<f64>>,
}

impl ScatterRoute {
    fn new(
        frame: &SpectralFrame,
        asym: AsymptoticData,
        cp: &CouplingParams,
        fit_rms: Option<Vec<f64>>,
    ) -> Result<Self, CliError> {
        let theorem3_residual = theorem3_residual(&asym, cp)?;
        Ok(Self {
            lambda: frame.lambda.clone(),
            q_plus: asym.q_plus,
            q_minus: asym.q_minus,
            p_plus: asym.p_plus,
            p_minus: asym.p_minus,
            z_re: frame.z.iter().map(|z| z.re).collect(),
            z_im: frame.z.iter().map(|z| z.im).collect(),
            theta: frame.theta.clone(),
            theorem3_residual,
            fit_rms,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct ScatterReport {
    pub horizon: f64,
    pub closed_form: ScatterRoute,
    pub fit: ScatterRoute,
    pub closed_form_bound: f64,
    pub fit_bound: f64,
    pub passed: bool,
}

pub fn scatter(v: &Validated, out: &Path) -> Result<ScatterReport, CliError> {
    create_out(out)?;
    let cp = &v.couplings;
    let horizon = v.config.t_final.abs();
    if horizon == 0.0 {
        return Err(CliError::ConfigInvalid("scatter needs t_final != 0".into()));
    }
    let frame = spectral_frame(&v.initial, cp)?;
    let closed_form = ScatterRoute::new(&frame, asymptotic_data(&frame)?, cp, None)?;

    let start = v.config.fit_window_fraction * horizon;
    let plus = fit_asymptotics(&integrate(&v.initial, cp, horizon, &v.config.integrator)?, (start, horizon))?;
    let minus = fit_asymptotics(&integrate(&v.initial, cp, -horizon, &v.config.integrator)?, (-horizon, -start))?;
    let rms = plus.rms.iter().zip(&minus.rms).map(|(a, b)| a.max(*b)).collect();
    let fit = ScatterRoute::new(&frame, AsymptoticData::from_fits(&plus, &minus), cp, Some(rms))?;

    let passed = worst(closed_form.theorem3_residual.iter().copied()) <= THEOREM3_CLOSED_FORM_BOUND
        && worst(fit.theorem3_residual.iter().copied()) <= THEOREM3_FIT_BOUND;
    let report = ScatterReport {
        horizon,
        closed_form,
        fit,
        closed_form_bound: THEOREM3_CLOSED_FORM_BOUND,
        fit_bound: THEOREM3_FIT_BOUND,
        passed,
    };
    write_json(&out.join("scatter.json"), &report)?;
    Ok(report)
}

/// Input of the `dual` subcommand: `{"lambda", "theta", "g", "g2"}`.
#[derive(Clone, Debug)]
pub struct DualInput {
    pub coordinates: DualCoordinates,
    pub couplings: CouplingParams,
}

impl DualInput {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            lambda: Vec<f64>,
            theta: Vec<f64>,
            g: f64,
            g2: f64,
        }
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let invalid = |e: String| CliError::ConfigInvalid(format!("{}: {e}", path.display()));
        let raw: Raw = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        Ok(Self {
            coordinates: DualCoordinates::new(raw.lambda, raw.theta).map_err(|e| invalid(e.to_string()))?,
            couplings: CouplingParams::new(raw.g, raw.g2).map_err(|e| invalid(e.to_string()))?,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct DualReport {
    pub lambda: Vec<f64>,
    pub theta: Vec<f64>,
    pub det_residual: f64,
    pub hamiltonian_closed_form: f64,
    pub hamiltonian_trace: f64,
    pub hamiltonian_relative_gap: f64,
    pub passed: bool,
}

pub fn dual(input: &DualInput, out: &Path) -> Result<DualReport, CliError> {
    create_out(out)?;
    let (dc, cp) = (&input.coordinates, &input.couplings);
    let a = build_dual_lax(dc, cp)?;
    let header = ["row", "col", "re", "im"].map(String::from);
    let m = a.rows();
    let rows = (0..m * m).map(|k| {
        let (i, j) = (k / m, k % m);
        vec![i.to_string(), j.to_string(), num(a[(i, j)].re), num(a[(i, j)].im)]
    });
    write_csv(&out.join("dual_lax.csv"), &header, rows)?;
    let det_residual = (determinant(&a)? - 1.0).norm();
    let closed = rsvd_hamiltonian(dc, cp)?;
    let trace = rsvd_hamiltonian_trace(&a)?;
    let gap = (closed - trace).abs() / closed.abs();
    let report = DualReport {
        lambda: dc.lambda().to_vec(),
        theta: dc.theta().to_vec(),
        det_residual,
        hamiltonian_closed_form: closed,
        hamiltonian_trace: trace,
        hamiltonian_relative_gap: gap,
        passed: det_residual <= 1e-8 && gap <= 1e-10,
    };
    write_json(&out.join("dual.json"), &report)?;
    Ok(report)
}

/// A residual next to the bound it is judged against.
#[derive(Debug, Serialize)]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn new(value: f64, bound: f64) -> Self {
        Self { value, bound, passed: value <= bound }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub perturb_xi: f64,
    pub commutation: Check,
    pub lax_equation: Check,
    pub spectral_identification: Check,
    pub check_a_entries: Check,
    pub check_a_inverse_entries: Check,
    pub quad_eqn: Check,
    pub z_linear: Check,
    pub z_quadratic: Check,
    pub z_branch: Check,
    pub dual_consistency: Check,
    pub energy_duality: Check,
    pub theorem3_closed_form: Check,
    /// `λ_a − λ_b` for `a < b`; empty for a single particle.
    pub pair_gaps: Vec<f64>,
    pub passed: bool,
}

pub fn verify(v: &Validated, perturb_xi: f64, out: &Path) -> Result<VerifyReport, CliError> {
    create_out(out)?;
    let (pp, cp, cfg) = (&v.initial, &v.couplings, &v.config);
    let commutation = if perturb_xi == 0.0 {
        commutation_residual(pp, cp)?
    } else {
        commutation_residual_perturbed(pp, cp, perturb_xi)?
    };

    let lax = if cfg.t_final == 0.0 {
        0.0
    } else {
        let opts = cfg.integrator.with_spacing(cfg.t_final, cfg.lax_dt);
        lax_residual(&integrate(pp, cp, cfg.t_final, &opts)?, cp)?.max_rel
    };
    let flow_t = cfg.t_final.abs().min(VERIFY_FLOW_T);
    let mut flow = 0.0f64;
    if flow_t > 0.0 {
        let opts = IntegratorOptions { grid_points: 101, ..cfg.integrator };
        for t in [flow_t, -flow_t] {
            flow = flow.max(flow_vs_trajectory_residual(pp, cp, &integrate(pp, cp, t, &opts)?)?);
        }
    }

    let frame = spectral_frame(pp, cp)?;
    let entries = check_a_entries_residual(&frame, pp, cp)?;
    let closed = z_closed_form(&frame.lambda, cp)?;
    let branch = frame.z.iter().zip(&closed).map(|(a, b)| (a - b).norm() / b.norm().max(1.0));
    let theorem3 = theorem3_residual(&asymptotic_data(&frame)?, cp)?;
    let n = pp.n();
    let pair_gaps = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .map(|(a, b)| frame.lambda[a] - frame.lambda[b])
        .collect();

    let mut report = VerifyReport {
        n,
        perturb_xi,
        commutation: Check::new(commutation.relative(), COMMUTATION_BOUND),
        lax_equation: Check::new(lax, LAX_RESIDUAL_REL_BOUND),
        spectral_identification: Check::new(flow, FLOW_VS_ODE_BOUND),
        check_a_entries: Check::new(entries.a_check.relative(), CHECK_A_BOUND),
        check_a_inverse_entries: Check::new(entries.a_check_inverse.relative(), CHECK_A_BOUND),
        quad_eqn: Check::new(entries.quad_eqn, QUAD_EQN_BOUND),
        z_linear: Check::new(worst_relative(&z_linear_residual(&frame, cp)), Z_EQUATION_BOUND),
        z_quadratic: Check::new(worst_relative(&z_quadratic_residual(&frame, cp)), Z_EQUATION_BOUND),
        z_branch: Check::new(worst(branch), Z_BRANCH_BOUND),
        dual_consistency: Check::new(dual_consistency_residual(pp, cp)?.relative(), DUAL_CONSISTENCY_BOUND),
        energy_duality: Check::new(energy_duality_residual(pp, cp)?.relative(), 1e-9),
        theorem3_closed_form: Check::new(worst(theorem3), THEOREM3_CLOSED_FORM_BOUND),
        pair_gaps,
        passed: false,
    };
    report.passed = [
        &report.commutation,
        &report.lax_equation,
        &report.spectral_identification,
        &report.check_a_entries,
        &report.check_a_inverse_entries,
        &report.quad_eqn,
        &report.z_linear,
        &report.z_quadratic,
        &report.z_branch,
        &report.dual_consistency,
        &report.energy_duality,
        &report.theorem3_closed_form,
    ]
    .iter()
    .all(|c| c.passed);
    write_json(&out.join("verify.json"), &report)?;
    Ok(report)
}

pub fn identities(seed: u64, sizes: &[usize], instances: usize, out: &Path) -> Result<IdentityReport, CliError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::ConfigInvalid("sizes must be a non-empty list of positive integers".into()));
    }
    create_out(out)?;
    let report = run_all(seed, sizes, instances)?;
    write_json(&out.join("identities.json"), &report)?;
    Ok(report)
}
