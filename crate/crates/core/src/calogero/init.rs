use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::ParticleState;
use crate::error::{Error, Result};

type C = Complex64;

/// Fixes the surplus unknown when solving `c_k = 0` for `(P, U)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Anchor {
    /// `Σ P_k` prescribed.
    SumP(C),
    /// `U` prescribed.
    U(C),
}

impl Default for Anchor {
    fn default() -> Self {
        Anchor::SumP(C::new(0.0, 0.0))
    }
}

pub const INIT_TOLERANCE: f64 = 1e-10;
const MAX_ITER: usize = 100;

fn residual(q: &[C], t: f64, z: &[C], anchor: Anchor) -> Result<Vec<C>> {
    let n = q.len();
    let s = ParticleState { t, q: q.to_vec(), p: z[..n].to_vec(), u: z[n], kappa: n };
    let mut r = s.first_integrals()?;
    r.push(match anchor {
        Anchor::SumP(sp) => z[..n].iter().sum::<C>() - sp,
        Anchor::U(u0) => z[n] - u0,
    });
    Ok(r)
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Central-difference Jacobian (exact up to roundoff: the residual is at
/// most quadratic in each unknown).
fn jacobian(q: &[C], t: f64, z: &[C], anchor: Anchor) -> Result<DMatrix<C>> {
    let m = z.len();
    let mut jac = DMatrix::<C>::zeros(m, m);
    for j in 0..m {
        let h = 1e-4 * (1.0 + z[j].norm());
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += h;
        zm[j] -= h;
        let (rp, rm) = (residual(q, t, &zp, anchor)?, residual(q, t, &zm, anchor)?);
        for i in 0..m {
            jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Damped Newton from `z0`; the step is the minimum-norm least-squares
/// solution, which stays well defined on symmetric configurations where the
/// solution set is not isolated.
fn newton(q: &[C], t: f64, mut z: Vec<C>, anchor: Anchor) -> Result<(Vec<C>, f64)> {
    let mut f = residual(q, t, &z, anchor)?;
    let mut fnorm = norm(&f);
    for _ in 0..MAX_ITER {
        if fnorm <= INIT_TOLERANCE * 1e-2 {
            break;
        }
        let jac = jacobian(q, t, &z, anchor)?;
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let svd = jac.svd(true, true);
        let Ok(step) = svd.solve(&rhs, 1e-13 * svd.singular_values.max().max(1e-300)) else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-4 {
            let trial: Vec<C> = z.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            if let Ok(ft) = residual(q, t, &trial, anchor) {
                let n = norm(&ft);
                if n.is_finite() && n < fnorm {
                    z = trial;
                    f = ft;
                    fnorm = n;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((z, fnorm))
}

/// Starting points for the momenta: zero first, then a deterministic set of
/// complex guesses (the admissible momenta are generically complex).
fn guesses(n: usize) -> Vec<Vec<C>> {
    let mut out = vec![vec![C::new(0.0, 0.0); n + 1]];
    for attempt in 0..12 {
        let r = 0.3 + 0.25 * attempt as f64;
        let mut z: Vec<C> = (0..n).map(|k| C::from_polar(r, 0.7 + 2.39996 * (k + attempt * n) as f64)).collect();
        z.push(C::from_polar(r, 1.9 + attempt as f64));
        out.push(z);
    }
    out
}

/// Solves the κ equations `c_k(P, U) = 0` (plus the anchor) at fixed
/// coordinates `q0` and time `t0`.
pub fn init_state(kappa: usize, q0: &[C], t0: f64, anchor: Anchor) -> Result<ParticleState> {
    if kappa == 0 || q0.len() != kappa {
        return Err(Error::InvalidInput(format!("kappa={kappa} needs {kappa} coordinates, got {}", q0.len())));
    }
    // validates distinctness
    ParticleState::new(t0, q0.to_vec(), vec![C::new(0.0, 0.0); kappa], C::new(0.0, 0.0))?;

    if kappa == 1 {
        let q = q0[0];
        let base = t0 * q * q - q.powi(4) / 2.0 + q;
        let (p, u) = match anchor {
            Anchor::SumP(p) => (p, -(p * p / 2.0 + base)),
            Anchor::U(u) => ((-2.0 * (base + u)).sqrt(), u),
        };
        return ParticleState::new(t0, vec![q], vec![p], u);
    }

    let mut best = f64::INFINITY;
    for z0 in guesses(kappa) {
        let mut z0 = z0;
        if let Anchor::U(u0) = anchor {
            z0[kappa] = u0;
        }
        let (z, res) = newton(q0, t0, z0, anchor)?;
        if res <= INIT_TOLERANCE {
            let s = ParticleState::new(t0, q0.to_vec(), z[..kappa].to_vec(), z[kappa])?;
            if s.max_abs_first_integral()? <= INIT_TOLERANCE {
                return Ok(s);
            }
        }
        best = best.min(res);
    }
    Err(Error::NoAdmissibleMomenta { residual: best })
}
