//! Acceptance run: one line per criterion, `PASS`/`FAIL` plus the measured
//! numbers. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command as Proc;
use std::sync::Arc;
use std::time::Instant;

use laxforge::config::default_initial;
use laxforge_core::calogero::{
    compatibility_check, governing_fields_from_state, init_state, integrate, Anchor, ParticleState, StateSource,
    Trajectory,
};
use laxforge_core::eigenflow::{choose_x_window, eigenflow_checks, RichardsonCheck, DEFAULT_BASE_VECTOR};
use laxforge_core::fields::{Grid2D, Polynomial};
use laxforge_core::fpcore::{
    constraint_residuals, governing_residuals, governing_residuals_tabulated, tabulate_governing,
    zero_curvature_residuals, DerivativeMode, FokkerPlanckSpec,
};
use laxforge_core::laxbuild::{build_pair, degree_audit, BuilderConfig, BuiltLax};
use laxforge_core::pii_reference::{
    airy_ai, particles_from_hm, reference_fields, reference_poles, solve_hastings_mcleod, BaikRainsLax,
    FpNormalization, HMSolution, DEFAULT_POINTS, DEFAULT_TOLERANCE,
};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn worst(rs: &[laxforge_core::fields::ResidualReport]) -> f64 {
    rs.iter().map(|r| r.max_abs).fold(0.0, f64::max)
}

fn hm() -> HMSolution {
    solve_hastings_mcleod(-10.0, 8.0, DEFAULT_POINTS, DEFAULT_TOLERANCE).expect("Hastings–McLeod solve")
}

fn crosscheck_grid() -> Grid2D {
    Grid2D::uniform((-2.0, 4.0, 40), (-3.0, 3.0, 40), 0.05).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sol = hm();
    let secs = start.elapsed().as_secs_f64();
    let inv = sol.invariants();
    let right = sol.eval(4.0).map_err(|e| e.to_string())?.q / airy_ai(4.0) - 1.0;
    let left = sol.eval(-6.0).map_err(|e| e.to_string())?.q / 3f64.sqrt() - 1.0;
    verdict(
        inv.ode_residual <= 1e-8 && right.abs() <= 1e-3 && left.abs() <= 1e-2 && inv.u_relation <= 1e-8 && secs <= 30.0,
        format!(
            "ode {:.1e}, q(4)/Ai(4)-1 {right:.1e}, q(-6)/sqrt3-1 {left:.1e}, u relation {:.1e}, {secs:.2}s",
            inv.ode_residual, inv.u_relation
        ),
    )
}

fn criterion_2(sol: &Arc<HMSolution>) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut fields, mut governing) = (0.0_f64, 0.0_f64);
    for kappa in [1, 2] {
        let reference = reference_fields(kappa, sol.clone()).map_err(|e| e.to_string())?;
        let mut samples = 0;
        while samples < 200 {
            let (t, x) = (rng.gen_range(-2.0..4.0), rng.gen_range(-3.0..3.0));
            let poles = reference_poles(sol, kappa, t).map_err(|e| e.to_string())?;
            if poles.iter().any(|p| (C::new(x, 0.0) - p).norm() < 0.05) {
                continue;
            }
            // the κ=2 closed form has a double pole at one time; skip its neighbourhood
            let Ok(s) = particles_from_hm(kappa, sol, t) else { continue };
            if laxforge_core::calogero::min_separation(&s.q).is_some_and(|(_, _, d)| d < 0.3) {
                continue;
            }
            let g = governing_fields_from_state(Arc::new(s));
            let (a, b) = (reference.eval(t, x).map_err(|e| e.to_string())?, g.eval(t, x).map_err(|e| e.to_string())?);
            fields = fields.max((a.0.v - b.0.v).norm()).max((a.1.v - b.1.v).norm());
            samples += 1;
        }
        let spec = FokkerPlanckSpec::quantum_pii(kappa as f64);
        let (a, b) = governing_residuals(&spec, &reference, &crosscheck_grid()).map_err(|e| e.to_string())?;
        governing = governing.max(a.max_abs).max(b.max_abs);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        fields <= 1e-8 && governing <= 1e-6 && secs <= 10.0,
        format!("fields {fields:.1e} on 2x200 points, governing {governing:.1e}, {secs:.2}s"),
    )
}

fn criterion_3(sol: &Arc<HMSolution>) -> Outcome {
    let bare = BaikRainsLax { hm: sol.clone(), normalization: FpNormalization::Bare };
    let analytic =
        zero_curvature_residuals(&bare, &crosscheck_grid(), DerivativeMode::Analytic).map_err(|e| e.to_string())?;
    // the flipped-q' control needs time derivatives of the table itself
    let fd_grid = Grid2D::uniform((-2.0, 4.0, 601), (-3.0, 3.0, 13), 0.05).unwrap();
    let fd = |hm: Arc<HMSolution>| -> Result<f64, String> {
        let lax = BaikRainsLax { hm, normalization: FpNormalization::Bare };
        Ok(worst(
            &zero_curvature_residuals(&lax, &fd_grid, DerivativeMode::FiniteDifference).map_err(|e| e.to_string())?,
        ))
    };
    let mut flipped = (**sol).clone();
    flipped.qprime.iter_mut().for_each(|v| *v = -*v);
    let (good, bad) = (fd(sol.clone())?, fd(Arc::new(flipped))?);
    verdict(
        worst(&analytic) <= 1e-6 && good <= 1e-6 && bad >= 1e-2,
        format!("zero curvature {:.1e} (fd {good:.1e}); flipped q' {bad:.1e}", worst(&analytic)),
    )
}

fn trajectory(kappa: usize) -> Result<Arc<Trajectory>, String> {
    let (q0, t0) = default_initial(kappa);
    let s = init_state(kappa, &q0, t0, Anchor::default()).map_err(|e| e.to_string())?;
    Ok(Arc::new(integrate(&s, t0 + 2.0, 1e-10, 1e-12).map_err(|e| e.to_string())?))
}

fn trajectory_grid(tr: &Trajectory) -> Grid2D {
    Grid2D::uniform((tr.t0(), tr.t_end(), 40), (-3.0, 3.0, 40), 0.05).unwrap()
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for kappa in [2, 3, 4] {
        let start = Instant::now();
        let tr = trajectory(kappa)?;
        let drift = tr.max_first_integral_drift().map_err(|e| e.to_string())?;
        let compat = compatibility_check(tr.as_ref(), 20).map_err(|e| e.to_string())?.max_abs;
        let secs = start.elapsed().as_secs_f64();
        ok &= drift <= 1e-8 && compat <= 1e-7 && secs <= 60.0;
        lines.push(format!("k={kappa} drift {drift:.1e} compat {compat:.1e} {secs:.2}s"));
    }
    verdict(ok, lines.join("; "))
}

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for kappa in 1..=4 {
        let tr = trajectory(kappa)?;
        let g = governing_fields_from_state(tr.clone());
        let spec = FokkerPlanckSpec::quantum_pii(kappa as f64);
        let grid = trajectory_grid(&tr);
        let (a, b) = governing_residuals(&spec, &g, &grid).map_err(|e| e.to_string())?;
        let analytic = a.max_abs.max(b.max_abs);
        // the same identities by finite differences of the tabulated fields
        let fd = |grid: &Grid2D| -> Result<laxforge_core::fields::ResidualReport, String> {
            let (bp, b1) = tabulate_governing(&g, grid).map_err(|e| e.to_string())?;
            let (a, b) = governing_residuals_tabulated(&spec, &bp, &b1).map_err(|e| e.to_string())?;
            Ok(if a.max_abs >= b.max_abs { a } else { b })
        };
        // stencils keep well clear of the poles, where the fields are not FD-resolvable
        let fd_grid = Grid2D::uniform((tr.t0(), tr.t_end(), 401), (-3.0, 3.0, 121), 0.5).unwrap();
        let check = RichardsonCheck::with_floor(fd(&fd_grid)?, fd(&fd_grid.refined().unwrap())?, 1e4 * 1e-10);
        ok &= analytic <= 1e-6 && check.confirmed;
        lines.push(format!("k={kappa} {analytic:.1e} (fd {:.1e} -> {:.1e})", check.coarse.max_abs, check.fine.max_abs));
    }
    verdict(ok, lines.join("; "))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for kappa in 1..=4 {
        let tr = trajectory(kappa)?;
        let spec = FokkerPlanckSpec::quantum_pii(kappa as f64);
        let grid = trajectory_grid(&tr);
        let lax = BuiltLax::new(tr.clone(), BuilderConfig::default());
        let (d, o) = constraint_residuals(&spec, &lax, &grid).map_err(|e| e.to_string())?;
        let zc = worst(&zero_curvature_residuals(&lax, &grid, DerivativeMode::Analytic).map_err(|e| e.to_string())?);
        let (mut remainder, mut degrees) = (0.0_f64, true);
        for &t in grid.t_values() {
            let s = tr.state_at(t).map_err(|e| e.to_string())?;
            let pair = build_pair(&s, &BuilderConfig::default()).map_err(|e| e.to_string())?;
            remainder = remainder.max(pair.remainders.l_minus).max(pair.remainders.b_minus);
            degrees &= degree_audit(&pair).is_ok();
        }
        let constraint = d.max_abs.max(o.max_abs);
        ok &= constraint <= 1e-8 && zc <= 1e-6 && degrees && remainder <= 1e-6;
        lines.push(format!("k={kappa} constraints {constraint:.1e} zc {zc:.1e} rem {remainder:.1e} degrees {degrees}"));
    }
    verdict(ok, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let (q0, t0) = default_initial(3);
    let s = init_state(3, &q0, t0, Anchor::default()).map_err(|e| e.to_string())?;
    let tr = Arc::new(integrate(&s, t0 + 1.0, 1e-12, 1e-14).map_err(|e| e.to_string())?);
    let x0 = choose_x_window(tr.as_ref(), t0, t0 + 1.0, 1.0, 0.5, 21).map_err(|e| e.to_string())?;
    let grid = Grid2D::uniform((t0, t0 + 1.0, 21), (x0, x0 + 1.0, 21), 0.05).unwrap();
    let lax = BuiltLax::new(tr.clone(), BuilderConfig::default());
    let g = governing_fields_from_state(tr);
    let spec = FokkerPlanckSpec::quantum_pii(3.0);
    let (_, c) =
        eigenflow_checks(&spec, &lax, Some(&g), &grid, DEFAULT_BASE_VECTOR, 1e-12).map_err(|e| e.to_string())?;
    let fd = |r: &Option<RichardsonCheck>| r.as_ref().map_or(f64::NAN, |r| r.fine.max_abs);
    verdict(
        c.passes(1e-6, 1e-5),
        format!(
            "window x in [{x0}, {}]: path {:.1e}, fp {:.1e} -> {:.1e}, first order {:.1e}, ode in x {:.1e}",
            x0 + 1.0,
            c.path_independence.max_abs,
            c.fokker_planck.coarse.max_abs,
            c.fokker_planck.fine.max_abs,
            fd(&c.first_order),
            fd(&c.ode_in_x)
        ),
    )
}

fn criterion_8() -> Outcome {
    let r = |v: f64| C::new(v, 0.0);
    let s = ParticleState::new(0.0, vec![r(1.0), r(-1.0)], vec![r(0.0); 2], r(1.0)).map_err(|e| e.to_string())?;
    let mut err: f64 = 0.0;
    let mut cmp = |a: &[C], b: &[f64]| {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            err = err.max((x - r(*y)).norm());
        }
    };
    let e = |x: laxforge_core::Error| x.to_string();
    cmp(&s.coulomb_sums().map_err(e)?, &[0.5, -0.5]);
    cmp(&s.auxiliary_a().map_err(e)?, &[-2.0, 0.0]);
    cmp(&[s.u, s.j0()], &[1.0, 0.5]);
    let rates = s.eom_rhs().map_err(e)?;
    let qpp: Vec<C> = rates.pdot.iter().map(|p| p / 2.0).collect();
    cmp(&qpp, &[0.25, -0.25]);
    cmp(&s.first_integrals().map_err(e)?, &[0.0, 0.0]);
    let (_, b1) = governing_fields_from_state(Arc::new(s.clone())).eval(0.0, 0.0).map_err(e)?;
    cmp(&[b1.v], &[0.25]);
    let pair = build_pair(&s, &BuilderConfig::default()).map_err(e)?;
    let poly = |p: &Polynomial<C>, want: &[f64]| (p - &Polynomial::from_real(want)).norm_inf();
    // B_d = -1 by direct substitution (two terms -1/2 · 2 each); see the ledger
    let polys = [
        poly(&pair.l_plus, &[-1.0, 0.0, 1.0]),
        poly(&pair.b_plus, &[0.0, -1.0]),
        poly(&pair.l_d, &[0.0, 1.0]),
        poly(&pair.b_d, &[-1.0]),
        poly(&pair.l_minus, &[0.0, 0.0, 0.25]),
    ];
    let err = polys.into_iter().fold(err, f64::max);
    verdict(err <= 1e-12, format!("max deviation {err:.1e} (B_d = -1, L- = x^2/4)"))
}

fn laxforge(args: &[&str], out: Option<&Path>) -> (i32, Vec<u8>) {
    let mut cmd = Proc::new(env!("CARGO_BIN_EXE_laxforge"));
    cmd.args(args);
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    let o = cmd.output().expect("run laxforge");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let start = Instant::now();
    let (code, out_a) = laxforge(&["verify", "--kappa", "3"], Some(&a));
    let secs = start.elapsed().as_secs_f64();
    let files = |d: &Path| ["verify.json", "run.json"].map(|f| std::fs::read(d.join(f)).ok());
    let first = files(&a);
    let (_, out_b) = laxforge(&["verify", "--kappa", "3"], Some(&a));
    let mut identical = out_a == out_b && first == files(&a) && first.iter().all(Option::is_some);
    // a second output directory changes only the recorded path
    laxforge(&["verify", "--kappa", "3"], Some(&b));
    identical &= files(&a)[0] == files(&b)[0];
    let usage = laxforge(&["simulate", "--kappa", "0"], None).0;
    let collision = laxforge(&["simulate", "--kappa", "2", "--q0", "1,1"], None).0;
    let failing = laxforge(&["crosscheck-hm", "--hm-table", "/nonexistent.csv"], None).0;
    verdict(
        code == 0 && identical && usage == 2 && collision == 3 && failing == 2 && secs <= 120.0,
        format!(
            "verify exit {code} in {secs:.2}s, byte-identical {identical}, kappa 0 -> {usage}, collision -> {collision}, \
             missing table -> {failing}"
        ),
    )
}

fn main() {
    let sol = Arc::new(hm());
    let results: [(&str, Outcome); 9] = [
        ("Hastings-McLeod oracle", criterion_1()),
        ("special-case equivalence k=1,2", criterion_2(&sol)),
        ("Baik-Rains pair", criterion_3(&sol)),
        ("Calogero conservation k=2,3,4", criterion_4()),
        ("governing-system membership k=1..4", criterion_5()),
        ("explicit Lax pair k=1..4", criterion_6()),
        ("eigenvector / Fokker-Planck chain k=3", criterion_7()),
        ("worked micro-values k=2", criterion_8()),
        ("CLI determinism and exit codes", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(d) => println!("criterion {}: PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {d}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
