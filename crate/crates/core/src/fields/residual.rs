use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residuals below this absolute level are treated as roundoff, not
/// discretization error, by [`richardson_confirms`].
pub const RICHARDSON_FLOOR: f64 = 1e-9;

/// Required reduction factor of an FD-limited residual under step halving
/// (fourth-order stencils give 16 in the asymptotic regime).
pub const RICHARDSON_FACTOR: f64 = 8.0;

/// Summary of one identity's pointwise residual over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity_name: String,
    pub max_abs: f64,
    pub rms: f64,
    /// `(t, x)` of the largest residual.
    pub worst_point: (f64, f64),
    pub samples: usize,
    /// Points dropped by pole exclusion or missing stencils.
    #[serde(default)]
    pub skipped: usize,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs.is_finite() && self.max_abs <= tol
    }

    pub fn with_skipped(mut self, skipped: usize) -> Self {
        self.skipped = skipped;
        self
    }
}

/// Max-abs / rms summary of `values`; ties for the worst point resolve to
/// the lexicographically smallest `(t, x)` so the result does not depend on
/// input order.
pub fn residual_norms(identity_name: &str, values: &[((f64, f64), Complex64)]) -> Result<ResidualReport> {
    if values.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut max_abs = -1.0_f64;
    let mut worst = (f64::NAN, f64::NAN);
    let mut sum_sq = 0.0;
    for &(pt, r) in values {
        // NaN residuals must surface, not hide behind comparisons
        let a = if r.re.is_nan() || r.im.is_nan() { f64::INFINITY } else { r.norm() };
        sum_sq += a * a;
        let better = a > max_abs || (a == max_abs && pt < worst);
        if better {
            max_abs = a;
            worst = pt;
        }
    }
    let rms = (sum_sq / values.len() as f64).sqrt().min(max_abs);
    Ok(ResidualReport {
        identity_name: identity_name.to_owned(),
        max_abs,
        rms,
        worst_point: worst,
        samples: values.len(),
        skipped: 0,
    })
}

/// Whether halving the step confirms discretization-limited convergence:
/// the fine residual is ≥ 8× smaller, or both sit at the roundoff floor.
pub fn richardson_confirms(coarse: f64, fine: f64) -> bool {
    richardson_confirms_above(coarse, fine, RICHARDSON_FLOOR)
}

/// [`richardson_confirms`] with a caller-supplied noise floor, for data
/// whose own error (e.g. dense output of an integrator at tolerance
/// `rtol`, differenced with step `h`: about `rtol/h`) exceeds roundoff.
pub fn richardson_confirms_above(coarse: f64, fine: f64, floor: f64) -> bool {
    if coarse <= floor && fine <= floor {
        return true;
    }
    fine.is_finite() && fine * RICHARDSON_FACTOR <= coarse
}
