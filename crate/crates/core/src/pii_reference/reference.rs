use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hm::HMSolution;
use crate::calogero::ParticleState;
use crate::error::{Error, Result};
use crate::fields::{Jet, NAN};
use crate::fpcore::{GenericFields, GoverningPair, LaxField, LaxPoint, LaxSlice, ScalarField};

type C = Complex64;

/// Below this |t + 2q' + 2q²| the two κ=2 poles are treated as merged.
pub const DOUBLE_POLE_FLOOR: f64 = 1e-8;

fn nan_jet() -> Jet {
    Jet::constant(NAN)
}

fn check_kappa(kappa: usize) -> Result<()> {
    if kappa == 1 || kappa == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("closed forms exist for kappa 1 and 2 only, got {kappa}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    BPlus,
    BOne,
}

/// One of the closed-form κ=1,2 governing fields built from `(q, q', u)`.
struct HmField {
    hm: Arc<HMSolution>,
    kappa: usize,
    which: Which,
}

impl ScalarField for HmField {
    fn jet(&self, t: f64, x: f64) -> Jet {
        let Ok([q, qp, u]) = self.hm.jets(t) else { return nan_jet() };
        let xj = Jet::var_x(x);
        match (self.kappa, self.which) {
            (1, w) => {
                let d = xj + qp / q;
                match w {
                    Which::BPlus => -d.recip(),
                    Which::BOne => -(q * q) / d - u,
                }
            }
            (_, w) => {
                let s = qp * 2.0 + q * q * 2.0;
                let d = xj * xj - Jet::var_t(t) - s;
                match w {
                    Which::BPlus => -xj / d,
                    Which::BOne => {
                        let num = (qp + q * q) * xj - q * (s + Jet::var_t(t));
                        -num / d + (q - u) * 0.5
                    }
                }
            }
        }
    }

    fn poles(&self, t: f64) -> Vec<C> {
        reference_poles(&self.hm, self.kappa, t).unwrap_or_default()
    }
}

/// Pole locations of the closed forms: `-q'/q` for κ=1,
/// `±√(t + 2q' + 2q²)` for κ=2.
pub fn reference_poles(hm: &HMSolution, kappa: usize, t: f64) -> Result<Vec<C>> {
    check_kappa(kappa)?;
    let p = hm.eval(t)?;
    Ok(if kappa == 1 {
        vec![C::new(-p.qp / p.q, 0.0)]
    } else {
        let r = C::new(t + 2.0 * p.qp + 2.0 * p.q * p.q, 0.0).sqrt();
        vec![r, -r]
    })
}

/// The known κ=1 and κ=2 solutions of the governing system for quantum
/// Painlevé II:
///
/// κ=1: `b₊ = -1/(x + q'/q)`, `b₁ = -q²/(x + q'/q) - u`;
///
/// κ=2: `b₊ = -x/(x² - t - 2q' - 2q²)`,
/// `b₁ = -((q' + q²)x - q(2q' + 2q² + t))/(x² - t - 2q' - 2q²) + (q - u)/2`.
///
/// Partials are exact given the interpolated `(q, q', u)`, using
/// `q'' = tq + 2q³` and `u' = -q²`. Outside the table range every jet is NaN,
/// so sweeps skip those points.
pub fn reference_fields(kappa: usize, hm: Arc<HMSolution>) -> Result<GoverningPair> {
    check_kappa(kappa)?;
    let field = |which| -> Arc<dyn ScalarField> { Arc::new(HmField { hm: hm.clone(), kappa, which }) };
    Ok(GoverningPair::Generic(GenericFields::new(field(Which::BPlus), field(Which::BOne))))
}

/// The particle state whose pole-form fields reproduce
/// [`reference_fields`] at time `t`.
///
/// κ=1: `Q = -q'/q`, `P = Q' = Q² - t - 2q²`.
/// κ=2: `Q = ±√w`, `w = t + 2q' + 2q²`, `P = 2Q' = ±w'/√w` with
/// `w' = 1 + 2q'' + 4qq'`.
/// `U` is fixed so the first integrals vanish; in closed form it is
/// `2u - Q - t²/2` (κ=1) and `2u - 2q - t²/2` (κ=2).
pub fn particles_from_hm(kappa: usize, hm: &HMSolution, t: f64) -> Result<ParticleState> {
    check_kappa(kappa)?;
    let p = hm.eval(t)?;
    let c = |v: f64| C::new(v, 0.0);
    let (q, p_mom) = if kappa == 1 {
        let qk = -p.qp / p.q;
        (vec![c(qk)], vec![c(qk * qk - t - 2.0 * p.q * p.q)])
    } else {
        let w = t + 2.0 * p.qp + 2.0 * p.q * p.q;
        if w.abs() < DOUBLE_POLE_FLOOR {
            return Err(Error::DegenerateState { t });
        }
        let wp = 1.0 + 2.0 * p.qpp + 4.0 * p.q * p.qp;
        let r = c(w).sqrt();
        (vec![r, -r], vec![wp / r, -wp / r])
    };
    let mut s = ParticleState::new(t, q, p_mom, c(0.0))?;
    // every c_k carries +U, so U = -(mean of the U-free parts)
    s.u = -s.sum_identity()?;
    Ok(s)
}

/// The closed form of `U` in terms of the Hastings–McLeod data.
pub fn hm_potential(kappa: usize, hm: &HMSolution, t: f64) -> Result<C> {
    check_kappa(kappa)?;
    let p = hm.eval(t)?;
    Ok(if kappa == 1 {
        C::new(2.0 * p.u + p.qp / p.q - t * t / 2.0, 0.0)
    } else {
        C::new(2.0 * p.u - 2.0 * p.q - t * t / 2.0, 0.0)
    })
}

/// Mismatch of the closed-form particle motion against the equations of
/// motion, from finite differences in `t` of [`particles_from_hm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConsistency {
    /// `max_k |κ² Q_k'' - κ Ṗ_k|` with `Q''` by Richardson-extrapolated
    /// central differences
    pub eom: f64,
    /// `|U' + Σ Q²/κ|`, `U'` likewise
    pub udot: f64,
}

/// Checks that the states of [`particles_from_hm`] move by the equations of
/// motion: second differences of `Q_k` with steps `h` and `h/2`, combined by
/// Richardson extrapolation, against `κ Ṗ_k` from the right-hand side.
pub fn hm_flow_consistency(kappa: usize, hm: &HMSolution, t: f64, h: f64) -> Result<FlowConsistency> {
    let s0 = particles_from_hm(kappa, hm, t)?;
    let states = |h: f64| -> Result<[ParticleState; 2]> {
        Ok([particles_from_hm(kappa, hm, t - h)?, particles_from_hm(kappa, hm, t + h)?])
    };
    let (wide, narrow) = (states(h)?, states(h / 2.0)?);
    let rates = s0.eom_rhs()?;
    let kap = kappa as f64;
    let mut eom: f64 = 0.0;
    for k in 0..kappa {
        let d2 = |pair: &[ParticleState; 2], h: f64| (pair[1].q[k] - s0.q[k] * 2.0 + pair[0].q[k]) / (h * h);
        let (a, b) = (d2(&wide, h), d2(&narrow, h / 2.0));
        let qpp = b + (b - a) / 3.0;
        eom = eom.max((qpp * kap * kap - rates.pdot[k] * kap).norm());
    }
    let d1 = |pair: &[ParticleState; 2], h: f64| (pair[1].u - pair[0].u) / (2.0 * h);
    let (a, b) = (d1(&wide, h), d1(&narrow, h / 2.0));
    let udot = b + (b - a) / 3.0;
    Ok(FlowConsistency { eom, udot: (udot - rates.udot).norm() })
}

/// The Painlevé II pair as printed: the `∂_t` matrix `[[0, q], [q, -x]]`
/// and the `∂_x` matrix `[[q², -qx - q'], [-qx + q', x² - t - q²]]`.
pub fn baik_rains_pair(hm: &HMSolution, t: f64, x: f64) -> Result<([[C; 2]; 2], [[C; 2]; 2])> {
    let p = hm.eval(t)?;
    let c = |v: f64| C::new(v, 0.0);
    let (q, qp) = (p.q, p.qp);
    Ok(([[c(0.0), c(q)], [c(q), c(-x)]], [[c(q * q), c(-q * x - qp)], [c(-q * x + qp), c(x * x - t - q * q)]]))
}

/// How the first component is normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FpNormalization {
    /// The matrices exactly as printed.
    #[default]
    Bare,
    /// `B → B + u·I`: the first component times `F₂(t)`, `(log F₂)' = u`,
    /// which is what solves the Fokker–Planck equation at κ=1.
    TracyWidom,
}

/// The Painlevé II pair as a Lax field over `(t, x)`.
#[derive(Clone)]
pub struct BaikRainsLax {
    pub hm: Arc<HMSolution>,
    pub normalization: FpNormalization,
}

struct BrSlice {
    t: f64,
    q: Jet,
    qp: Jet,
    shift: Jet,
}

impl LaxSlice for BrSlice {
    fn at(&self, x: f64) -> Result<LaxPoint> {
        let (q, qp) = (self.q, self.qp);
        let xj = Jet::var_x(x);
        let tj = Jet::var_t(self.t);
        Ok(LaxPoint {
            l1: q * q,
            l2: xj * xj - tj - q * q,
            l_plus: -(q * xj) - qp,
            l_minus: -(q * xj) + qp,
            b1: self.shift,
            b2: -xj + self.shift,
            b_plus: q,
            b_minus: q,
        })
    }
}

impl LaxField for BaikRainsLax {
    fn slice(&self, t: f64) -> Result<Box<dyn LaxSlice + '_>> {
        let [q, qp, u] = self.hm.jets(t)?;
        let shift = match self.normalization {
            FpNormalization::Bare => Jet::zero(),
            FpNormalization::TracyWidom => u,
        };
        Ok(Box::new(BrSlice { t, q, qp, shift }))
    }
}
