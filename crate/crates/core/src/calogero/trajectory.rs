use num_complex::Complex64;

use super::state::{min_separation, ParticleState, COLLISION_TOLERANCE};
use crate::error::{Error, Result};
use crate::fields::{residual_norms, Jet, ResidualReport, NAN};
use crate::ode::{self, Solution};

type C = Complex64;

/// Anything that yields a particle state at a requested time.
pub trait StateSource: Send + Sync {
    fn kappa(&self) -> usize;
    /// Closed time interval on which states are available.
    fn time_range(&self) -> (f64, f64);
    fn state_at(&self, t: f64) -> Result<ParticleState>;
}

/// A single state is a source valid only at its own time.
impl StateSource for ParticleState {
    fn kappa(&self) -> usize {
        self.kappa
    }

    fn time_range(&self) -> (f64, f64) {
        (self.t, self.t)
    }

    fn state_at(&self, t: f64) -> Result<ParticleState> {
        if (t - self.t).abs() <= 1e-14 * (1.0 + t.abs()) {
            Ok(self.clone())
        } else {
            Err(Error::OutOfRange { t, lo: self.t, hi: self.t })
        }
    }
}

/// Accepted integrator nodes plus dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kappa: usize,
    pub nodes: Vec<ParticleState>,
    solution: Solution,
}

impl Trajectory {
    pub fn t0(&self) -> f64 {
        self.nodes[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.nodes.last().unwrap().t
    }

    pub fn first(&self) -> &ParticleState {
        &self.nodes[0]
    }

    pub fn last(&self) -> &ParticleState {
        self.nodes.last().unwrap()
    }

    /// Largest `|c_k(t) - c_k(t0)|` over all nodes.
    pub fn max_first_integral_drift(&self) -> Result<f64> {
        let c0 = self.nodes[0].first_integrals()?;
        let mut worst = 0.0_f64;
        for s in &self.nodes {
            for (a, b) in s.first_integrals()?.iter().zip(&c0) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok(worst)
    }
}

impl StateSource for Trajectory {
    fn kappa(&self) -> usize {
        self.kappa
    }

    fn time_range(&self) -> (f64, f64) {
        let (a, b) = (self.t0(), self.t_end());
        (a.min(b), a.max(b))
    }

    fn state_at(&self, t: f64) -> Result<ParticleState> {
        let (lo, hi) = self.time_range();
        let v = self.solution.eval(t).ok_or(Error::OutOfRange { t, lo, hi })?;
        Ok(ParticleState::from_vector(self.kappa, t, &v))
    }
}

fn rhs(kappa: usize, t: f64, y: &[C]) -> Result<Vec<C>> {
    let s = ParticleState::from_vector(kappa, t, y);
    let r = s.eom_rhs()?;
    let mut out = r.qdot;
    out.extend(r.pdot);
    out.push(r.udot);
    Ok(out)
}

/// Integrates the equations of motion from `s0` to `t_end` with the
/// Dormand–Prince 5(4) pair. Steps ending with two particles closer than
/// ten times the collision tolerance are rejected.
pub fn integrate(s0: &ParticleState, t_end: f64, rel_tol: f64, abs_tol: f64) -> Result<Trajectory> {
    s0.validate()?;
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let kappa = s0.kappa;
    let mut opts = ode::Options::new(rel_tol, abs_tol);
    opts.h_min = 1e-12 * (1.0 + s0.t.abs().max(t_end.abs()));
    let guard =
        |_t: f64, y: &[C]| min_separation(&y[..kappa]).is_none_or(|(_, _, d)| d >= 10.0 * COLLISION_TOLERANCE);
    let solution = ode::integrate(|t, y| rhs(kappa, t, y), s0.t, &s0.to_vector(), t_end, &opts, guard)?;
    let nodes = solution.ts.iter().zip(&solution.ys).map(|(&t, y)| ParticleState::from_vector(kappa, t, y)).collect();
    Ok(Trajectory { kappa, nodes, solution })
}

/// Time jets of the coordinates, momenta, `U` and `A_k` of a state, with
/// rates taken from the equations of motion.
#[derive(Clone, Debug)]
pub struct StateJets {
    pub q: Vec<Jet>,
    pub p: Vec<Jet>,
    pub u: Jet,
    pub r: Vec<Jet>,
    pub a: Vec<Jet>,
    pub j0: Jet,
}

impl StateJets {
    pub fn new(s: &ParticleState) -> Result<Self> {
        let rates = s.eom_rhs()?;
        let kap = s.kappa_f();
        let q: Vec<Jet> = (0..s.kappa).map(|k| Jet::of_time(s.q[k], rates.qdot[k], rates.pdot[k] / kap)).collect();
        let p: Vec<Jet> = (0..s.kappa).map(|k| Jet::of_time(s.p[k], rates.pdot[k], NAN)).collect();
        let uddot = -2.0 * (0..s.kappa).map(|k| s.q[k] * rates.qdot[k]).sum::<C>() / kap;
        let u = Jet::of_time(s.u, rates.udot, uddot);
        let r: Vec<Jet> = (0..s.kappa)
            .map(|k| (0..s.kappa).filter(|&j| j != k).fold(Jet::zero(), |acc, j| acc + (q[k] - q[j]).recip()))
            .collect();
        let tj = Jet::var_t(s.t);
        let a = (0..s.kappa).map(|k| p[k] + tj - q[k] * q[k] - r[k] * 2.0).collect();
        let sum_q = q.iter().fold(Jet::zero(), |acc, v| acc + *v);
        let j0 = (tj * tj * 0.5 + u - sum_q) / kap;
        Ok(Self { q, p, u, r, a, j0 })
    }
}

fn probe_times(src: &dyn StateSource, n_probe: usize) -> Vec<f64> {
    let (lo, hi) = src.time_range();
    if n_probe <= 1 || lo == hi {
        return vec![lo];
    }
    (0..n_probe).map(|i| lo + (hi - lo) * i as f64 / (n_probe - 1) as f64).collect()
}

/// Compares `(κA_k' + 2Q_kA_k)/2`, with `A_k'` by the chain rule along the
/// flow, against `Σ_{j≠k} (A_k - A_j)/(Q_k - Q_j)²` at `n_probe` times.
///
/// The two sides agree for every state evolved by the equations of motion,
/// so this certifies the implementation of the flow rather than the
/// admissibility of the state; see [`residue_relation_check`] for the latter.
pub fn compatibility_check(src: &dyn StateSource, n_probe: usize) -> Result<ResidualReport> {
    let mut values = Vec::new();
    for t in probe_times(src, n_probe) {
        let Ok(s) = src.state_at(t) else { continue };
        let Ok(j) = StateJets::new(&s) else { continue };
        let kap = s.kappa_f();
        for k in 0..s.kappa {
            let lhs = (j.a[k].t * kap + s.q[k] * j.a[k].v * 2.0) / 2.0;
            let rhs: C =
                (0..s.kappa).filter(|&m| m != k).map(|m| (j.a[k].v - j.a[m].v) / (s.q[k] - s.q[m]).powi(2)).sum();
            values.push(((t, s.q[k].re), lhs - rhs));
        }
    }
    residual_norms("compatibility", &values)
}

/// Residue relation at the double poles in closed form:
/// `t²/2 + U + Σ Q = A_k(t - Q_k² - A_k/2) - Σ_{j≠k} (A_k - A_j)/(Q_k - Q_j)`.
/// Vanishes exactly when the first integrals do.
pub fn residue_relation(s: &ParticleState) -> Result<Vec<C>> {
    let a = s.auxiliary_a()?;
    let lhs = s.t * s.t / 2.0 + s.u + s.q.iter().sum::<C>();
    Ok((0..s.kappa)
        .map(|k| {
            let inter: C = (0..s.kappa).filter(|&j| j != k).map(|j| (a[k] - a[j]) / (s.q[k] - s.q[j])).sum();
            lhs - (a[k] * (s.t - s.q[k] * s.q[k] - a[k] / 2.0) - inter)
        })
        .collect())
}

/// [`residue_relation`] sampled at `n_probe` times.
pub fn residue_relation_check(src: &dyn StateSource, n_probe: usize) -> Result<ResidualReport> {
    let mut values = Vec::new();
    for t in probe_times(src, n_probe) {
        let Ok(s) = src.state_at(t) else { continue };
        let Ok(r) = residue_relation(&s) else { continue };
        values.extend(r.into_iter().zip(&s.q).map(|(v, q)| ((t, q.re), v)));
    }
    residual_norms("residue_relation", &values)
}
