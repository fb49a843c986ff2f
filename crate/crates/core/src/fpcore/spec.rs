use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Expr, Jet};

/// Coefficients of `(κ∂_t + σ∂_xx + v∂_x + α) F = 0`.
///
/// JSON form: `{"kappa": 2, "sigma": "1", "v": "t - x^2", "alpha": "0"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FokkerPlanckSpec {
    pub kappa: f64,
    pub sigma: Expr,
    pub v: Expr,
    pub alpha: Expr,
}

/// Jets of `(σ, v, α)` at one point.
#[derive(Clone, Copy, Debug)]
pub struct Coefficients {
    pub sigma: Jet,
    pub v: Jet,
    pub alpha: Jet,
}

impl FokkerPlanckSpec {
    pub fn new(kappa: f64, sigma: &str, v: &str, alpha: &str) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { kappa, sigma: Expr::parse(sigma)?, v: Expr::parse(v)?, alpha: Expr::parse(alpha)? })
    }

    /// Quantum Painlevé II: `σ ≡ 1`, `v = t - x²`, `α ≡ 0`.
    pub fn quantum_pii(kappa: f64) -> Self {
        Self::new(kappa, "1", "t - x^2", "0").expect("built-in form")
    }

    /// Heat equation `κ∂_t F + ∂_xx F = 0`.
    pub fn heat(kappa: f64) -> Self {
        Self::new(kappa, "1", "0", "0").expect("built-in form")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        if !(s.kappa > 0.0) {
            return Err(Error::InvalidInput("kappa must be positive".into()));
        }
        Ok(s)
    }

    pub fn coefficients(&self, t: f64, x: f64) -> Result<Coefficients> {
        let sigma = self.sigma.jet(t, x);
        if sigma.v.norm() == 0.0 || !sigma.v.is_finite() {
            return Err(Error::InvalidInput(format!("sigma vanishes at (t={t}, x={x})")));
        }
        Ok(Coefficients { sigma, v: self.v.jet(t, x), alpha: self.alpha.jet(t, x) })
    }

    /// Applies the operator to a field with known partials.
    pub fn apply(
        &self,
        t: f64,
        x: f64,
        f: Complex64,
        ft: Complex64,
        fx: Complex64,
        fxx: Complex64,
    ) -> Result<Complex64> {
        let c = self.coefficients(t, x)?;
        Ok(ft * self.kappa + c.sigma.v * fxx + c.v.v * fx + c.alpha.v * f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pii_form() {
        let s = FokkerPlanckSpec::quantum_pii(2.0);
        let c = s.coefficients(0.5, 2.0).unwrap();
        assert_eq!(c.sigma.v, Complex64::new(1.0, 0.0));
        assert_eq!(c.v.v, Complex64::new(-3.5, 0.0));
        assert_eq!(c.v.t, Complex64::new(1.0, 0.0));
        assert_eq!(c.alpha.v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let s = FokkerPlanckSpec::quantum_pii(3.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kappa":3.0,"sigma":"1","v":"t - x^2","alpha":"0"}"#);
        assert_eq!(FokkerPlanckSpec::from_json(&text).unwrap(), s);
        let numeric = FokkerPlanckSpec::from_json(r#"{"kappa":1,"sigma":1,"v":"-1","alpha":0}"#).unwrap();
        assert_eq!(numeric.v.as_constant(), Some(-1.0));
        assert!(FokkerPlanckSpec::from_json(r#"{"kappa":0,"sigma":"1","v":"0","alpha":"0"}"#).is_err());
    }

    #[test]
    fn vanishing_sigma_rejected() {
        let s = FokkerPlanckSpec::new(1.0, "x", "0", "0").unwrap();
        assert!(s.coefficients(0.0, 0.0).is_err());
        assert!(s.coefficients(0.0, 1.0).is_ok());
    }
}
