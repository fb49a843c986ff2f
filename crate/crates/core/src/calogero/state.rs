use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Default minimum pairwise distance between particles.
pub const COLLISION_TOLERANCE: f64 = 1e-8;

/// Configuration of κ particles: coordinates `Q`, momenta `P = κ Q'` and
/// the potential function `U` with `κ U' = -Σ Q_k²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub t: f64,
    pub q: Vec<C>,
    pub p: Vec<C>,
    pub u: C,
    pub kappa: usize,
}

/// Time derivatives of a state along the flow.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates {
    pub qdot: Vec<C>,
    pub pdot: Vec<C>,
    pub udot: C,
}

/// Smallest pairwise distance `(i, j, |Q_i - Q_j|)`, if κ ≥ 2.
pub fn min_separation(q: &[C]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let d = (q[i] - q[j]).norm();
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

fn check_distinct(q: &[C], tol: f64) -> Result<()> {
    match min_separation(q) {
        Some((i, j, distance)) if !(distance > tol) => Err(Error::ParticleCollision { i, j, distance }),
        _ => Ok(()),
    }
}

/// `R_k = Σ_{j≠k} 1/(Q_k - Q_j)`.
pub fn coulomb_sums(q: &[C]) -> Result<Vec<C>> {
    check_distinct(q, 0.0)?;
    Ok((0..q.len()).map(|k| (0..q.len()).filter(|&j| j != k).map(|j| (q[k] - q[j]).inv()).sum()).collect())
}

impl ParticleState {
    pub fn new(t: f64, q: Vec<C>, p: Vec<C>, u: C) -> Result<Self> {
        let s = Self { t, kappa: q.len(), q, p, u };
        s.validate()?;
        Ok(s)
    }

    /// Checks shape and the collision tolerance.
    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 {
            return Err(Error::InvalidInput("kappa must be at least 1".into()));
        }
        if self.q.len() != self.kappa || self.p.len() != self.kappa {
            return Err(Error::InvalidInput(format!(
                "kappa={} but {} coordinates and {} momenta",
                self.kappa,
                self.q.len(),
                self.p.len()
            )));
        }
        if !self.t.is_finite() || !self.q.iter().chain(&self.p).chain([&self.u]).all(|c| c.is_finite()) {
            return Err(Error::InvalidInput("non-finite state component".into()));
        }
        check_distinct(&self.q, COLLISION_TOLERANCE)
    }

    pub fn kappa_f(&self) -> f64 {
        self.kappa as f64
    }

    pub fn coulomb_sums(&self) -> Result<Vec<C>> {
        coulomb_sums(&self.q)
    }

    /// `A_k = P_k + t - Q_k² - 2R_k`.
    pub fn auxiliary_a(&self) -> Result<Vec<C>> {
        let r = self.coulomb_sums()?;
        Ok((0..self.kappa).map(|k| self.p[k] + self.t - self.q[k] * self.q[k] - r[k] * 2.0).collect())
    }

    /// Right-hand side of the equations of motion.
    pub fn eom_rhs(&self) -> Result<Rates> {
        check_distinct(&self.q, 0.0)?;
        let kap = self.kappa_f();
        let q = &self.q;
        let pdot = (0..self.kappa)
            .map(|k| {
                let inter: C = (0..self.kappa).filter(|&j| j != k).map(|j| 8.0 * (q[k] - q[j]).powi(-3)).sum();
                (-2.0 * q[k] * (self.t - q[k] * q[k]) + (kap - 2.0) - inter) / kap
            })
            .collect();
        Ok(Rates {
            qdot: self.p.iter().map(|p| p / kap).collect(),
            pdot,
            udot: -q.iter().map(|v| v * v).sum::<C>() / kap,
        })
    }

    /// The κ first integrals `c_k`; admissible states have all `c_k = 0`.
    pub fn first_integrals(&self) -> Result<Vec<C>> {
        check_distinct(&self.q, 0.0)?;
        let kap = self.kappa_f();
        let (q, p, t) = (&self.q, &self.p, self.t);
        let n = self.kappa;
        Ok((0..n)
            .map(|k| {
                let mut c = p[k] * p[k] / 2.0 + t * q[k] * q[k] - q[k].powi(4) / 2.0 - (kap - 2.0) * q[k] + self.u;
                for j in (0..n).filter(|&j| j != k) {
                    let dkj = q[k] - q[j];
                    c -= 2.0 / (dkj * dkj);
                    c -= (p[k] + p[j]) / dkj;
                    for l in (0..n).filter(|&l| l != k && l != j) {
                        c += 2.0 / (dkj * (q[j] - q[l]));
                    }
                }
                c
            })
            .collect())
    }

    /// `(1/κ) Σ_k (P_k²/2 + tQ_k² - Q_k⁴/2 - (κ-2)Q_k - Σ_{j≠k} 2/(Q_k-Q_j)²) + U`,
    /// which equals the mean of the first integrals.
    pub fn sum_identity(&self) -> Result<C> {
        check_distinct(&self.q, 0.0)?;
        let kap = self.kappa_f();
        let (q, p, t) = (&self.q, &self.p, self.t);
        let mut total = C::new(0.0, 0.0);
        for k in 0..self.kappa {
            total += p[k] * p[k] / 2.0 + t * q[k] * q[k] - q[k].powi(4) / 2.0 - (kap - 2.0) * q[k];
            for j in (0..self.kappa).filter(|&j| j != k) {
                total -= 2.0 / (q[k] - q[j]).powi(2);
            }
        }
        Ok(total / kap + self.u)
    }

    /// `J₀ = (t²/2 + U - Σ Q_k)/κ`.
    pub fn j0(&self) -> C {
        (self.t * self.t / 2.0 + self.u - self.q.iter().sum::<C>()) / self.kappa_f()
    }

    pub fn max_abs_first_integral(&self) -> Result<f64> {
        Ok(self.first_integrals()?.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Flat vector `[Q…, P…, U]` used by the integrator.
    pub fn to_vector(&self) -> Vec<C> {
        let mut v = Vec::with_capacity(2 * self.kappa + 1);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v.push(self.u);
        v
    }

    pub fn from_vector(kappa: usize, t: f64, v: &[C]) -> Self {
        Self { t, q: v[..kappa].to_vec(), p: v[kappa..2 * kappa].to_vec(), u: v[2 * kappa], kappa }
    }

    /// Same state with `(Q, P)` jointly permuted: new index `i` takes old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            q: perm.iter().map(|&i| self.q[i]).collect(),
            p: perm.iter().map(|&i| self.p[i]).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(v: f64) -> C {
        C::new(v, 0.0)
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// κ=2, Q=[1,-1], P=[0,0], t=0, U=1.
    fn symmetric() -> ParticleState {
        ParticleState::new(0.0, vec![c(1.0), c(-1.0)], vec![c(0.0), c(0.0)], c(1.0)).unwrap()
    }

    #[test]
    fn coulomb_examples() {
        let r = coulomb_sums(&[c(1.0), c(-1.0)]).unwrap();
        assert_eq!(r, vec![c(0.5), c(-0.5)]);
        let r = coulomb_sums(&[c(2.0), c(0.0), c(-2.0)]).unwrap();
        assert!(close(r[0], c(0.75), 1e-15) && close(r[1], c(0.0), 1e-15) && close(r[2], c(-0.75), 1e-15));
        assert!(matches!(coulomb_sums(&[c(1.0), c(1.0)]), Err(Error::ParticleCollision { .. })));
    }

    #[test]
    fn auxiliary_examples() {
        let s = ParticleState::new(0.0, vec![c(0.0)], vec![c(0.0)], c(0.0)).unwrap();
        assert_eq!(s.auxiliary_a().unwrap(), vec![c(0.0)]);
        // A_k = P + t - Q² - 2R with R = [1/2, -1/2]: [0+0-1-1, 0+0-1+1]
        assert_eq!(symmetric().auxiliary_a().unwrap(), vec![c(-2.0), c(0.0)]);
        let mut s = symmetric();
        s.t = 0.3;
        let a = s.auxiliary_a().unwrap();
        assert!(close(a[0], c(-1.7), 1e-15) && close(a[1], c(0.3), 1e-15));
    }

    #[test]
    fn eom_examples() {
        // κ²Q'' = -2Q(t-Q²) + κ-2 - 8/(ΔQ)³ at Q=1: 2 + 0 - 1 = 1, so Q'' = 1/4
        let r = symmetric().eom_rhs().unwrap();
        assert_eq!(r.pdot, vec![c(0.5), c(-0.5)]);
        assert_eq!(r.udot, c(-1.0));
        assert_eq!(r.qdot, vec![c(0.0), c(0.0)]);
        let s = ParticleState::new(0.4, vec![c(1.3)], vec![C::new(0.2, 0.7)], c(0.0)).unwrap();
        let r = s.eom_rhs().unwrap();
        assert!(close(r.pdot[0], c(-2.0 * 1.3 * (0.4 - 1.69) - 1.0), 1e-14));
    }

    #[test]
    fn first_integral_examples() {
        let s = symmetric();
        let cs = s.first_integrals().unwrap();
        assert!(cs.iter().all(|v| v.norm() < 1e-15));
        let mut s2 = s.clone();
        s2.u = c(3.0);
        assert!(s2.first_integrals().unwrap().iter().all(|v| close(*v, c(2.0), 1e-15)));
        let (q, p, u, t) = (c(0.7), C::new(0.1, -0.4), C::new(0.3, 0.2), 1.1);
        let s1 = ParticleState::new(t, vec![q], vec![p], u).unwrap();
        let expect = p * p / 2.0 + t * q * q - q.powi(4) / 2.0 + q + u;
        assert!(close(s1.first_integrals().unwrap()[0], expect, 1e-15));
    }

    #[test]
    fn j0_examples() {
        assert_eq!(symmetric().j0(), c(0.5));
        let s = ParticleState::new(2.0, vec![c(0.5), c(-0.5)], vec![c(0.0); 2], c(-2.0)).unwrap();
        assert!(s.j0().norm() < 1e-15);
        let mut shifted = symmetric();
        for q in &mut shifted.q {
            *q += 0.25;
        }
        assert!(close(shifted.j0(), c(0.5 - 0.25), 1e-15));
    }

    #[test]
    fn mirror_symmetry_at_kappa_two() {
        let s = ParticleState::new(
            0.3,
            vec![C::new(0.8, 0.2), C::new(-1.1, 0.4)],
            vec![C::new(0.1, 0.3), C::new(-0.5, 0.2)],
            c(0.0),
        )
        .unwrap();
        let mirrored = ParticleState {
            q: s.q.iter().rev().map(|v| -v).collect(),
            p: s.p.iter().rev().map(|v| -v).collect(),
            ..s.clone()
        };
        let a = s.eom_rhs().unwrap().pdot;
        let b = mirrored.eom_rhs().unwrap().pdot;
        assert!(close(b[0], -a[1], 1e-14) && close(b[1], -a[0], 1e-14));
    }

    fn state_strategy(kappa: usize) -> impl Strategy<Value = ParticleState> {
        (
            -2.0..2.0f64,
            prop::collection::vec((-2.0..2.0f64, -1.0..1.0f64), kappa),
            prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), kappa),
            (-2.0..2.0f64, -2.0..2.0f64),
        )
            .prop_filter_map("separated", move |(t, q, p, u)| {
                let q: Vec<C> = q.into_iter().map(|(a, b)| C::new(a, b)).collect();
                if min_separation(&q).is_some_and(|m| m.2 < 0.2) {
                    return None;
                }
                let p = p.into_iter().map(|(a, b)| C::new(a, b)).collect();
                ParticleState::new(t, q, p, C::new(u.0, u.1)).ok()
            })
    }

    proptest! {
        #[test]
        fn coulomb_sums_cancel(s in (1usize..6).prop_flat_map(state_strategy)) {
            let total: C = s.coulomb_sums().unwrap().iter().sum();
            prop_assert!(total.norm() <= 1e-12 * (1.0 + s.coulomb_sums().unwrap().iter().map(|r| r.norm()).sum::<f64>()));
        }

        #[test]
        fn mean_first_integral_is_sum_identity(s in (1usize..6).prop_flat_map(state_strategy)) {
            let cs = s.first_integrals().unwrap();
            let mean = cs.iter().sum::<C>() / s.kappa_f();
            let scale = 1.0 + cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            prop_assert!((mean - s.sum_identity().unwrap()).norm() <= 1e-12 * scale * 10.0);
        }

        #[test]
        fn auxiliary_shifts_with_time(s in (1usize..5).prop_flat_map(state_strategy), d in -1.0..1.0f64) {
            let mut s2 = s.clone();
            s2.t += d;
            for (a, b) in s.auxiliary_a().unwrap().iter().zip(s2.auxiliary_a().unwrap()) {
                prop_assert!((b - a - d).norm() < 1e-12);
            }
        }

        #[test]
        fn permutation_equivariance(s in (2usize..5).prop_flat_map(state_strategy), rot in 1usize..4) {
            let n = s.kappa;
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let sp = s.permuted(&perm);
            let (a, ap) = (s.eom_rhs().unwrap(), sp.eom_rhs().unwrap());
            let (c0, cp) = (s.first_integrals().unwrap(), sp.first_integrals().unwrap());
            let (x0, xp) = (s.auxiliary_a().unwrap(), sp.auxiliary_a().unwrap());
            for i in 0..n {
                prop_assert!((ap.pdot[i] - a.pdot[perm[i]]).norm() < 1e-10);
                prop_assert!((cp[i] - c0[perm[i]]).norm() < 1e-10);
                prop_assert!((xp[i] - x0[perm[i]]).norm() < 1e-10);
            }
            prop_assert!((ap.udot - a.udot).norm() < 1e-12);
            prop_assert!((sp.j0() - s.j0()).norm() < 1e-12);
        }
    }
}
