//! The five pipelines. Each returns the text for stdout; files go to the
//! output directory when one is configured.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use laxforge_core::calogero::{
    compatibility_check, governing_fields_from_state, init_state, integrate, min_separation, read_trajectory_csv,
    residue_relation_check, write_trajectory_csv, ParticleState, StateSource, Trajectory,
};
use laxforge_core::eigenflow::{choose_x_window, eigenflow_checks, RichardsonCheck, DEFAULT_BASE_VECTOR};
use laxforge_core::fields::{residual_norms, Grid2D, ResidualReport};
use laxforge_core::fpcore::{
    constraint_residuals, derived_consistency, governing_residuals, zero_curvature_residuals, DerivativeMode,
    FokkerPlanckSpec,
};
use laxforge_core::laxbuild::{build_pair, degree_audit, BuilderConfig, BuiltLax, POLYNOMIALITY_TOLERANCE};
use laxforge_core::pii_reference::{
    baik_rains_pair, hm_flow_consistency, particles_from_hm, reference_fields, solve_hastings_mcleod, BaikRainsLax,
    FpNormalization, HMSolution, DEFAULT_POINTS, DEFAULT_TOLERANCE, DEFAULT_WINDOW,
};
use laxforge_core::Error as CoreError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, Format, GridSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::Report;

/// Tolerances of the verification report.
pub mod tol {
    /// Identities evaluated with exact partial derivatives.
    pub const ANALYTIC: f64 = 1e-8;
    /// The governing PDEs (second derivatives of rational fields near poles).
    pub const GOVERNING: f64 = 1e-6;
    /// Compatibility of the particle flow with the governing system.
    pub const COMPATIBILITY: f64 = 1e-7;
    /// Zero curvature (analytic partials); t-derivatives come off the dense output.
    pub const ZERO_CURVATURE: f64 = 1e-6;
    /// Finite-difference identities; Richardson confirmation is also required.
    pub const FD: f64 = 1e-5;
    /// Path independence of the transported eigenvector.
    pub const PATH: f64 = 1e-6;
    /// Closed-form particle motion against the equations of motion.
    pub const FLOW: f64 = 1e-5;
    /// Agreement of trajectory file rows with their re-integration.
    pub const ROWS: f64 = 1e-6;
}

/// Nearly coincident κ=2 poles (a double pole of the closed form); checks
/// at such times are skipped with a warning.
pub const DOUBLE_POLE_GAP: f64 = 0.3;

/// Where output goes and what was said on stderr.
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
    /// Set when the run completed but a check failed.
    pub failure: Option<CliError>,
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> CliResult<()> {
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

/// The integrated particle run behind `simulate`, `build-lax`, `verify`
/// and `report`.
pub struct ParticleRun {
    pub start: ParticleState,
    pub trajectory: Arc<Trajectory>,
    /// Rows of a trajectory file, when the run came from one.
    pub rows: Option<Vec<ParticleState>>,
}

impl ParticleRun {
    pub fn kappa(&self) -> usize {
        self.start.kappa
    }

    pub fn time_range(&self) -> (f64, f64) {
        self.trajectory.time_range()
    }

    /// The configured grid, or the default one over the trajectory's span.
    pub fn grid(&self, cfg: &RunConfig) -> CliResult<Grid2D> {
        if cfg.grid_set {
            cfg.grid.grid()
        } else {
            let (lo, hi) = self.time_range();
            RunConfig::default_grid(lo, hi).grid()
        }
    }
}

/// A trajectory file is re-integrated from its first row to its last
/// time; a state snapshot is integrated to `t1` (default: two time units
/// on); otherwise the state comes from `init_state`.
pub fn particle_run(cfg: &RunConfig) -> CliResult<ParticleRun> {
    let abs_tol = cfg.tol * 1e-2;
    let (start, t_end, rows) = if let Some(p) = &cfg.trajectory {
        let rows = read_trajectory_csv(open(p)?)?;
        let t_end = rows.last().expect("non-empty").t;
        (rows[0].clone(), t_end, Some(rows))
    } else if let Some(p) = &cfg.state {
        let s: ParticleState = serde_json::from_reader(open(p)?)
            .map_err(|e| CliError::usage(format!("bad state snapshot {}: {e}", p.display())))?;
        s.validate()?;
        let t_end = if cfg.t1_set { cfg.t1 } else { s.t + crate::config::DEFAULT_SPAN };
        (s, t_end, None)
    } else {
        (init_state(cfg.kappa, &cfg.q0, cfg.t0, cfg.anchor())?, cfg.t1, None)
    };
    let trajectory = Arc::new(integrate(&start, t_end, cfg.tol, abs_tol)?);
    Ok(ParticleRun { start, trajectory, rows })
}

#[derive(Serialize)]
struct SimulationSummary {
    kappa: usize,
    t0: f64,
    t1: f64,
    nodes: usize,
    max_first_integral_drift: f64,
    threshold: f64,
    pass: bool,
}

/// Allowed first-integral drift: `100 × tol × max(1, span)`.
pub fn drift_threshold(tol: f64, span: f64) -> f64 {
    100.0 * tol * span.abs().max(1.0)
}

fn summary_text(format: Format, s: &SimulationSummary) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(s).expect("serializes") + "\n",
        Format::Csv => format!(
            "kappa,t0,t1,nodes,max_first_integral_drift,threshold,pass\n{},{},{},{},{:e},{:e},{}\n",
            s.kappa, s.t0, s.t1, s.nodes, s.max_first_integral_drift, s.threshold, s.pass
        ),
    }
}

pub fn simulate(cfg: &RunConfig) -> CliResult<Outcome> {
    let run = particle_run(cfg)?;
    let tr = &run.trajectory;
    let drift = tr.max_first_integral_drift()?;
    let threshold = drift_threshold(cfg.tol, tr.t_end() - tr.t0());
    let summary = SimulationSummary {
        kappa: run.kappa(),
        t0: tr.t0(),
        t1: tr.t_end(),
        nodes: tr.nodes.len(),
        max_first_integral_drift: drift,
        threshold,
        pass: drift <= threshold,
    };
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &tr.nodes)?;
    let csv = String::from_utf8(csv).expect("utf-8 csv");
    let text = summary_text(cfg.format, &summary);
    let (stdout, warnings) = if cfg.out.is_some() {
        write_out(cfg, "trajectory.csv", &csv)?;
        write_out(cfg, "final_state.json", &(serde_json::to_string_pretty(tr.last())? + "\n"))?;
        write_out(cfg, "summary.json", &summary_text(Format::Json, &summary))?;
        (text, vec![])
    } else {
        (csv, vec![text.trim_end().to_string()])
    };
    let failure = (!summary.pass).then(|| CliError::Verification(vec!["first_integral_drift".into()]));
    Ok(Outcome { stdout, warnings, failure })
}

#[derive(Serialize)]
struct LaxCertificates {
    t: f64,
    remainders: laxforge_core::laxbuild::Remainders,
    degree_audit: laxforge_core::laxbuild::DegreeReport,
}

/// The pair at `t0`, or at `t1` when that is given explicitly.
pub fn build_lax(cfg: &RunConfig) -> CliResult<Outcome> {
    let builder = BuilderConfig::with_phi(&cfg.phi)?;
    let state = if cfg.t1_set && cfg.t1 != cfg.t0 || cfg.trajectory.is_some() {
        let run = particle_run(cfg)?;
        run.trajectory.last().clone()
    } else if let Some(p) = &cfg.state {
        serde_json::from_reader(open(p)?).map_err(|e| CliError::usage(format!("bad state snapshot: {e}")))?
    } else {
        init_state(cfg.kappa, &cfg.q0, cfg.t0, cfg.anchor())?
    };
    let pair = build_pair(&state, &builder)?;
    let audit = degree_audit(&pair)?;
    let export = serde_json::to_string_pretty(&pair.export())? + "\n";
    let certs = LaxCertificates { t: pair.t, remainders: pair.remainders, degree_audit: audit };
    let certs = serde_json::to_string_pretty(&certs)? + "\n";
    write_out(cfg, "lax.json", &export)?;
    write_out(cfg, "lax_certificates.json", &certs)?;
    Ok(Outcome { stdout: export, warnings: vec![], failure: None })
}

type Check<'a> = Box<dyn Fn() -> CliResult<Report> + Send + Sync + 'a>;

/// Runs independent checks on the worker pool and merges their reports in
/// a fixed order.
fn run_checks(checks: Vec<Check<'_>>) -> CliResult<Report> {
    let parts: Vec<CliResult<Report>> = checks.par_iter().map(|c| c()).collect();
    let mut report = Report::default();
    for p in parts {
        report.merge(p?);
    }
    Ok(report)
}

fn worst(reports: &[ResidualReport]) -> &ResidualReport {
    reports.iter().max_by(|a, b| a.max_abs.total_cmp(&b.max_abs)).expect("at least one report")
}

/// Builder certificates at every grid time: `B_d` polynomiality, division
/// remainders of `L₋`, `B₋` and the degree audit. Returns whether the pair
/// could be built everywhere.
fn builder_certificates(
    src: &dyn StateSource,
    builder: &BuilderConfig,
    grid: &Grid2D,
    report: &mut Report,
) -> CliResult<bool> {
    let (mut l_minus, mut b_minus) = (0.0_f64, 0.0_f64);
    let (mut bd_ok, mut division_ok, mut degrees_ok) = (true, true, true);
    for &t in grid.t_values() {
        let s = src.state_at(t)?;
        match build_pair(&s, builder) {
            Ok(pair) => {
                l_minus = l_minus.max(pair.remainders.l_minus);
                b_minus = b_minus.max(pair.remainders.b_minus);
                degrees_ok &= degree_audit(&pair).is_ok();
            }
            Err(CoreError::BdNotPolynomial { .. }) => bd_ok = false,
            Err(CoreError::PolynomialityViolated { entry, relative }) => {
                division_ok = false;
                // the builder stops at the first bad entry; B₋ is then unknown
                if entry == "Lminus" {
                    l_minus = l_minus.max(relative);
                    b_minus = f64::NAN;
                } else {
                    b_minus = b_minus.max(relative);
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    report.flag("bd_polynomial", bd_ok);
    report.insert("polynomiality_l_minus", l_minus, l_minus, division_ok && l_minus <= POLYNOMIALITY_TOLERANCE);
    report.insert("polynomiality_b_minus", b_minus, b_minus, division_ok && b_minus <= POLYNOMIALITY_TOLERANCE);
    report.flag("degree_audit", degrees_ok);
    Ok(bd_ok && division_ok)
}

fn richardson_entry(report: &mut Report, name: &str, check: &RichardsonCheck, tol: f64) {
    report.insert(name, check.fine.max_abs, check.fine.rms, check.passes(tol));
}

/// Largest relative deviation of trajectory file rows from the
/// re-integrated flow.
fn row_agreement(rows: &[ParticleState], src: &dyn StateSource) -> CliResult<ResidualReport> {
    let mut values = Vec::new();
    for row in rows {
        let s = src.state_at(row.t)?;
        let (a, b) = (row.to_vector(), s.to_vector());
        let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        values.push(((row.t, 0.0), num_complex::Complex64::new(diff / scale, 0.0)));
    }
    Ok(residual_norms("trajectory_rows", &values)?)
}

/// Nodes per axis of the finite-difference zero-curvature grid. It spans
/// the run's times but only `|x| ≤ 1`: the entries are polynomials of
/// degree up to 2κ, and far out their size (not the identity) dominates
/// the absolute differencing error.
pub const FD_NT: usize = 401;
pub const FD_NX: usize = 41;

/// Below this level time differences of dense output (error ≈ rtol/h) mask
/// the fourth-order trend, so Richardson confirmation is waived.
pub fn trajectory_noise_floor(rtol: f64) -> f64 {
    1e4 * rtol
}

/// `None` when the sampling grid has too few times or misses `|x| < 1`.
fn fd_grid(grid: &Grid2D) -> CliResult<Option<Grid2D>> {
    let (t, x) = (grid.t_values(), grid.x_values());
    let x = (x[0].max(-1.0), x[x.len() - 1].min(1.0));
    if grid.nt() < 5 || !(x.0 < x.1) {
        return Ok(None);
    }
    GridSpec { t: (t[0], t[t.len() - 1]), x, nt: FD_NT, nx: FD_NX }.grid().map(Some)
}

/// Every identity along the particle run.
pub fn verify_identities(cfg: &RunConfig, run: &ParticleRun) -> CliResult<Report> {
    let grid = run.grid(cfg)?;
    let kappa = run.kappa();
    let spec = FokkerPlanckSpec::quantum_pii(kappa as f64);
    let builder = BuilderConfig::with_phi(&cfg.phi)?;
    let src: Arc<dyn StateSource> = run.trajectory.clone();
    let lax = &BuiltLax::new(src.clone(), builder.clone());
    let governing = governing_fields_from_state(src.clone());

    let mut report = Report::default();
    let buildable = builder_certificates(src.as_ref(), &builder, &grid, &mut report)?;

    let mut checks: Vec<Check> = vec![
        Box::new(|| {
            let mut r = Report::default();
            let c0 = run.start.max_abs_first_integral()?;
            r.insert("first_integrals_initial", c0, c0, c0 <= tol::ANALYTIC);
            let drift = run.trajectory.max_first_integral_drift()?;
            let (lo, hi) = run.time_range();
            r.insert("first_integral_drift", drift, drift, drift <= drift_threshold(cfg.tol, hi - lo));
            r.residual(&compatibility_check(src.as_ref(), 20)?, tol::COMPATIBILITY);
            r.residual(&residue_relation_check(src.as_ref(), 20)?, tol::COMPATIBILITY);
            if let Some(rows) = &run.rows {
                r.residual(&row_agreement(rows, src.as_ref())?, tol::ROWS);
            }
            Ok(r)
        }),
        Box::new(|| {
            let mut r = Report::default();
            let (a, b) = governing_residuals(&spec, &governing, &grid)?;
            r.residual(&a, tol::GOVERNING);
            r.residual(&b, tol::GOVERNING);
            Ok(r)
        }),
    ];
    if buildable {
        checks.push(Box::new(|| {
            let mut r = Report::default();
            let (d, o) = constraint_residuals(&spec, lax, &grid)?;
            r.residual(&d, tol::ANALYTIC);
            r.residual(&o, tol::ANALYTIC);
            for z in zero_curvature_residuals(lax, &grid, DerivativeMode::Analytic)? {
                r.residual(&z, tol::ZERO_CURVATURE);
            }
            r.residual(&derived_consistency(&spec, lax, &grid)?, tol::ANALYTIC);
            Ok(r)
        }));
        if let Some(fd) = fd_grid(&grid)? {
            checks.push(Box::new(move || {
                let fine_grid = fd.refined()?;
                let coarse = zero_curvature_residuals(lax, &fd, DerivativeMode::FiniteDifference)?;
                let fine = zero_curvature_residuals(lax, &fine_grid, DerivativeMode::FiniteDifference)?;
                let floor = trajectory_noise_floor(cfg.tol);
                let check = RichardsonCheck::with_floor(worst(&coarse).clone(), worst(&fine).clone(), floor);
                let mut r = Report::default();
                richardson_entry(&mut r, "zero_curvature_fd", &check, tol::FD);
                Ok(r)
            }));
        }
    }
    report.merge(run_checks(checks)?);
    Ok(report)
}

fn emit(cfg: &RunConfig, report: &Report, file_stem: &str) -> CliResult<String> {
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let ext = match cfg.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    write_out(cfg, &format!("{file_stem}.{ext}"), &text)?;
    Ok(text)
}

fn finish(cfg: &RunConfig, report: Report, stem: &str, warnings: Vec<String>) -> CliResult<Outcome> {
    let stdout = emit(cfg, &report, stem)?;
    let failures = report.failures();
    let failure = (!failures.is_empty()).then_some(CliError::Verification(failures));
    Ok(Outcome { stdout, warnings, failure })
}

pub fn verify(cfg: &RunConfig) -> CliResult<Outcome> {
    let run = particle_run(cfg)?;
    let report = verify_identities(cfg, &run)?;
    finish(cfg, report, "verify", vec![])
}

/// Side of the eigenflow rectangle.
pub const EIGENFLOW_SIDE: f64 = 1.0;
pub const EIGENFLOW_NODES: usize = 21;
pub const EIGENFLOW_TOL: f64 = 1e-12;

/// The eigenvector chain on a unit rectangle at the start of the run,
/// with the x-window chosen clear of the poles.
pub fn eigenflow_identities(cfg: &RunConfig, run: &ParticleRun) -> CliResult<Report> {
    let (lo, hi) = run.time_range();
    let (ta, tb) = (lo, (lo + EIGENFLOW_SIDE).min(hi));
    if !(tb > ta) {
        return Err(CliError::usage("the eigenvector chain needs a time span > 0"));
    }
    let src: Arc<dyn StateSource> = run.trajectory.clone();
    let x0 = choose_x_window(src.as_ref(), ta, tb, EIGENFLOW_SIDE, 0.5, EIGENFLOW_NODES)?;
    let grid =
        GridSpec { t: (ta, tb), x: (x0, x0 + EIGENFLOW_SIDE), nt: EIGENFLOW_NODES, nx: EIGENFLOW_NODES }.grid()?;
    let lax = BuiltLax::new(src.clone(), BuilderConfig::with_phi(&cfg.phi)?);
    let governing = governing_fields_from_state(src);
    let spec = FokkerPlanckSpec::quantum_pii(run.kappa() as f64);
    let (field, checks) = eigenflow_checks(&spec, &lax, Some(&governing), &grid, DEFAULT_BASE_VECTOR, EIGENFLOW_TOL)?;
    if cfg.out.is_some() {
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        write_out(cfg, "eigenflow.csv", &String::from_utf8(buf).expect("utf-8 csv"))?;
    }
    let mut r = Report::default();
    r.residual_as("eigenflow_path_independence", &checks.path_independence, tol::PATH);
    richardson_entry(&mut r, "eigenflow_fokker_planck", &checks.fokker_planck, tol::FD);
    if let Some(c) = &checks.first_order {
        richardson_entry(&mut r, "eigenflow_first_order_pde", c, tol::FD);
    }
    if let Some(c) = &checks.ode_in_x {
        richardson_entry(&mut r, "eigenflow_ode_in_x", c, tol::FD);
    }
    Ok(r)
}

pub fn report(cfg: &RunConfig) -> CliResult<Outcome> {
    let run = particle_run(cfg)?;
    let mut report = verify_identities(cfg, &run)?;
    report.merge(eigenflow_identities(cfg, &run)?);
    finish(cfg, report, "report", vec![])
}

/// Hastings–McLeod table: solved on the default window widened to cover
/// the run, or read from a file.
pub fn hm_solution(cfg: &RunConfig) -> CliResult<HMSolution> {
    match &cfg.hm_table {
        Some(p) => Ok(HMSolution::read_csv(open(p)?)?),
        None => {
            let (a, b) = (cfg.t0.min(DEFAULT_WINDOW.0), cfg.t1.max(DEFAULT_WINDOW.1));
            let n = ((b - a) / (DEFAULT_WINDOW.1 - DEFAULT_WINDOW.0) * (DEFAULT_POINTS - 1) as f64).ceil() as usize + 1;
            Ok(solve_hastings_mcleod(a, b, n, DEFAULT_TOLERANCE)?)
        }
    }
}

/// Invariants of the table, in the order ODE, positivity, `u` relation.
fn hm_invariants(hm: &HMSolution) -> (Report, Option<String>) {
    let inv = hm.invariants();
    let mut r = Report::default();
    r.insert("hm_ode_residual", inv.ode_residual, inv.ode_residual, inv.ode_residual <= tol::ANALYTIC);
    let neg = (-inv.min_q).max(0.0);
    r.insert("hm_positivity", neg, neg, inv.min_q > 0.0);
    r.insert("hm_u_relation", inv.u_relation, inv.u_relation, inv.u_relation <= tol::ANALYTIC);
    (r, inv.first_failure(tol::ANALYTIC).map(|n| format!("hm_{n}")))
}

/// Particle states of the closed forms at the grid times; degenerate
/// κ=2 configurations are skipped with a warning.
fn hm_states(
    kappa: usize,
    hm: &HMSolution,
    times: &[f64],
    warnings: &mut Vec<String>,
) -> CliResult<Vec<ParticleState>> {
    let mut out = Vec::new();
    for &t in times {
        match particles_from_hm(kappa, hm, t) {
            Ok(s) if min_separation(&s.q).is_none_or(|(_, _, d)| d >= DOUBLE_POLE_GAP) => out.push(s),
            Ok(_) | Err(CoreError::DegenerateState { .. }) => {
                warnings.push(format!("kappa={kappa}: near-double pole at t={t}; checks at this time skipped"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Difference step for the flow check: the coordinates behave like
/// `√(t − t*)` next to a double pole, so the stencil shrinks with the
/// squared separation.
fn flow_step(s: &ParticleState) -> f64 {
    let d = min_separation(&s.q).map_or(f64::INFINITY, |(_, _, d)| d);
    FLOW_STEP.min(FLOW_STEP_SCALE * d * d)
}

pub const FLOW_STEP: f64 = 1e-3;
const FLOW_STEP_SCALE: f64 = 5e-3;

fn crosscheck_kappa(kappa: usize, hm: &Arc<HMSolution>, grid: &Grid2D, states: &[ParticleState]) -> CliResult<Report> {
    let mut r = Report::default();
    let reference = reference_fields(kappa, hm.clone())?;
    let (mut bp, mut b1) = (Vec::new(), Vec::new());
    let mut integrals: f64 = 0.0;
    let (mut eom, mut udot) = (0.0_f64, 0.0_f64);
    for s in states {
        integrals = integrals.max(s.max_abs_first_integral()?);
        let flow = hm_flow_consistency(kappa, hm, s.t, flow_step(s))?;
        eom = eom.max(flow.eom);
        udot = udot.max(flow.udot);
        let from_state = governing_fields_from_state(Arc::new(s.clone()));
        let poles = reference.poles(s.t)?;
        for &x in grid.x_values() {
            if !grid.admissible(x, &poles) {
                continue;
            }
            let (a, b) = (reference.eval(s.t, x)?, from_state.eval(s.t, x)?);
            bp.push(((s.t, x), a.0.v - b.0.v));
            b1.push(((s.t, x), a.1.v - b.1.v));
        }
    }
    let name = |n: &str| format!("kappa{kappa}_{n}");
    // every time may have been skipped; the entries are then absent
    if !bp.is_empty() {
        r.residual_as(&name("fields_b_plus"), &residual_norms("", &bp)?, tol::ANALYTIC);
        r.residual_as(&name("fields_b_one"), &residual_norms("", &b1)?, tol::ANALYTIC);
    }
    if !states.is_empty() {
        r.insert(name("particle_first_integrals"), integrals, integrals, integrals <= tol::ANALYTIC);
        r.insert(name("flow_eom"), eom, eom, eom <= tol::FLOW);
        r.insert(name("flow_udot"), udot, udot, udot <= tol::FLOW);
    }
    let spec = FokkerPlanckSpec::quantum_pii(kappa as f64);
    let (a, b) = governing_residuals(&spec, &reference, grid)?;
    r.residual_as(&name("governing_conservation_law"), &a, tol::GOVERNING);
    r.residual_as(&name("governing_second"), &b, tol::GOVERNING);
    Ok(r)
}

/// Rows in `t` of the finite-difference zero-curvature grid.
pub const BR_FD_NT: usize = 301;

fn baik_rains(hm: &Arc<HMSolution>, grid: &Grid2D) -> CliResult<Report> {
    let mut r = Report::default();
    let bare = BaikRainsLax { hm: hm.clone(), normalization: FpNormalization::Bare };
    let zc = zero_curvature_residuals(&bare, grid, DerivativeMode::Analytic)?;
    r.residual_as("baik_rains_zero_curvature", worst(&zc), tol::GOVERNING);
    // time derivatives from the table itself, so q' must be the derivative
    // of q; needs a time interval
    let (t, x) = (grid.t_values(), grid.x_values());
    if t[0] < t[t.len() - 1] {
        let fd_grid =
            GridSpec { t: (t[0], t[t.len() - 1]), x: (x[0], x[x.len() - 1]), nt: BR_FD_NT, nx: grid.nx().max(5) }
                .grid()?;
        let coarse = zero_curvature_residuals(&bare, &fd_grid, DerivativeMode::FiniteDifference)?;
        let fine = zero_curvature_residuals(&bare, &fd_grid.refined()?, DerivativeMode::FiniteDifference)?;
        let check = RichardsonCheck::new(worst(&coarse).clone(), worst(&fine).clone());
        richardson_entry(&mut r, "baik_rains_zero_curvature_fd", &check, tol::FD);
    }
    let tw = BaikRainsLax { hm: hm.clone(), normalization: FpNormalization::TracyWidom };
    let (d, o) = constraint_residuals(&FokkerPlanckSpec::quantum_pii(1.0), &tw, grid)?;
    r.residual_as("baik_rains_tw_constraints", if d.max_abs >= o.max_abs { &d } else { &o }, tol::ANALYTIC);
    // the printed matrices at one point, as a smoke check of the export
    let (bt, _) = baik_rains_pair(hm, t[0], x[0])?;
    r.flag("baik_rains_trace", (bt[0][0] + bt[1][1] + x[0]).norm() < 1e-14);
    Ok(r)
}

pub fn crosscheck_hm(cfg: &RunConfig) -> CliResult<Outcome> {
    let hm = Arc::new(hm_solution(cfg)?);
    let (mut report, first_failure) = hm_invariants(&hm);
    if let Some(name) = first_failure {
        let stdout = emit(cfg, &report, "crosscheck")?;
        return Ok(Outcome { stdout, warnings: vec![], failure: Some(CliError::Verification(vec![name])) });
    }
    if cfg.hm_table.is_none() && cfg.out.is_some() {
        let mut buf = Vec::new();
        hm.write_csv(&mut buf)?;
        write_out(cfg, "hm.csv", &String::from_utf8(buf).expect("utf-8 csv"))?;
    }
    let grid = cfg.grid.grid()?;
    let (lo, hi) = hm.range();
    if grid.t_values()[0] < lo || *grid.t_values().last().unwrap() > hi {
        return Err(CliError::usage(format!("grid times outside the HM table range [{lo}, {hi}]")));
    }
    let mut warnings = Vec::new();
    let states = [1, 2].map(|k| hm_states(k, &hm, grid.t_values(), &mut warnings));
    let [s1, s2] = states;
    let (s1, s2) = (s1?, s2?);
    let checks: Vec<Check> = vec![
        Box::new(|| crosscheck_kappa(1, &hm, &grid, &s1)),
        Box::new(|| crosscheck_kappa(2, &hm, &grid, &s2)),
        Box::new(|| baik_rains(&hm, &grid)),
    ];
    report.merge(run_checks(checks)?);
    finish(cfg, report, "crosscheck", warnings)
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    if cfg.out.is_some() {
        write_out(cfg, "run.json", &(serde_json::to_string_pretty(cfg)? + "\n"))?;
    }
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::BuildLax => build_lax(cfg),
        Command::Verify => verify(cfg),
        Command::CrosscheckHm => crosscheck_hm(cfg),
        Command::Report => report(cfg),
    }
}

/// Caps the global worker pool from `LAXFORGE_THREADS`.
pub fn init_threads(var: Option<String>) -> CliResult<()> {
    let Some(v) = var else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::usage(format!("LAXFORGE_THREADS must be a positive integer, got {v:?}")))?;
    // a second initialization (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
