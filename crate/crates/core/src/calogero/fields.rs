use std::sync::Arc;

use num_complex::Complex64;

use super::state::ParticleState;
use super::trajectory::{StateJets, StateSource};
use crate::error::Result;
use crate::fields::Jet;
use crate::fpcore::{GoverningPair, ScalarField};

type C = Complex64;

/// Governing fields in rational pole form driven by a particle state:
///
/// `b₊ = -(1/κ) Σ 1/(x - Q_k)`,
/// `2b₁ = (1/κ) Σ A_k/(x - Q_k) - (2/κ) Σ Q_k - J₀`.
///
/// Time partials come from the equations of motion.
#[derive(Clone)]
pub struct PoleFields {
    pub source: Arc<dyn StateSource>,
}

/// Pole fields frozen at one time.
#[derive(Clone, Debug)]
pub struct PoleSlice {
    kappa: f64,
    q: Vec<Jet>,
    a: Vec<Jet>,
    /// `-(2/κ) Σ Q - J₀`
    offset: Jet,
}

impl PoleSlice {
    pub fn new(s: &ParticleState) -> Result<Self> {
        let j = StateJets::new(s)?;
        let kappa = s.kappa_f();
        let sum_q = j.q.iter().fold(Jet::zero(), |acc, q| acc + *q);
        Ok(Self { kappa, offset: -(sum_q * (2.0 / kappa)) - j.j0, q: j.q, a: j.a })
    }

    /// `(b₊, b₁)` at `x`.
    pub fn eval(&self, x: f64) -> (Jet, Jet) {
        let xj = Jet::var_x(x);
        let mut bp = Jet::zero();
        let mut b1 = Jet::zero();
        for (q, a) in self.q.iter().zip(&self.a) {
            let inv = (xj - *q).recip();
            bp = bp + inv;
            b1 = b1 + *a * inv;
        }
        (bp * (-1.0 / self.kappa), (b1 / self.kappa + self.offset) * 0.5)
    }

    pub fn poles(&self) -> Vec<C> {
        self.q.iter().map(|q| q.v).collect()
    }
}

impl PoleFields {
    pub fn new(source: Arc<dyn StateSource>) -> Self {
        Self { source }
    }

    pub fn slice(&self, t: f64) -> Result<PoleSlice> {
        PoleSlice::new(&self.source.state_at(t)?)
    }
}

/// The governing pair realised by a state or trajectory.
pub fn governing_fields_from_state(source: Arc<dyn StateSource>) -> GoverningPair {
    GoverningPair::Pole(PoleFields::new(source))
}

/// `Π_k (x - Q_k(t))` as a field, the natural `L₊` for pole-form pairs.
#[derive(Clone)]
pub struct PoleProduct {
    pub source: Arc<dyn StateSource>,
}

impl ScalarField for PoleProduct {
    fn jet(&self, t: f64, x: f64) -> Jet {
        let Ok(j) = self.source.state_at(t).and_then(|s| StateJets::new(&s)) else {
            return Jet::constant(C::new(f64::NAN, f64::NAN));
        };
        let xj = Jet::var_x(x);
        j.q.iter().fold(Jet::constant(1.0), |acc, q| acc * (xj - *q))
    }

    fn zeros(&self, t: f64) -> Vec<C> {
        self.source.state_at(t).map(|s| s.q).unwrap_or_default()
    }
}
