//! Dense univariate polynomials in `x` with complex (or dual) coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::{Dual, Scalar};
use crate::error::{Error, Result};

/// Leading coefficients below this fraction of the largest coefficient
/// magnitude are dropped.
pub const TRIM_TOLERANCE: f64 = 1e-12;

/// Polynomial with coefficients in ascending degree order.
///
/// The zero polynomial has an empty coefficient list; otherwise the leading
/// coefficient exceeds the trim tolerance relative to the largest one.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Scalar = Complex64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    /// `Π_k (x - r_k)`.
    pub fn from_roots(roots: &[T]) -> Self {
        let mut c = vec![T::one()];
        for &r in roots {
            c.push(T::zero());
            // multiply by (x - r): c_i <- c_{i-1} - r c_i
            for i in (1..c.len()).rev() {
                c[i] = c[i - 1] - r * c[i];
            }
            c[0] = -r * c[0];
        }
        Self::new(c)
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().map(Scalar::magnitude).fold(0.0_f64, f64::max);
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.magnitude() <= TRIM_TOLERANCE * max {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<T> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        let c = self.coeffs.iter().enumerate().skip(1).map(|(k, &a)| a * T::from_f64(k as f64)).collect();
        Self::new(c)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Long division: `self = quotient * den + remainder`, `deg remainder < deg den`.
    pub fn div_rem(&self, den: &Self) -> Result<(Self, Self)> {
        let dd = den.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        let lead = den.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![T::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dc) in den.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
            // exact cancellation of the eliminated term
            rem[k + dd] = T::zero();
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }
}

impl Polynomial<Complex64> {
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }
}

impl Polynomial<Dual> {
    /// Value part of every coefficient.
    pub fn value_part(&self) -> Polynomial<Complex64> {
        Polynomial::new(self.coeffs.iter().map(|c| c.v).collect())
    }

    /// Time-derivative part of every coefficient.
    pub fn rate_part(&self) -> Polynomial<Complex64> {
        Polynomial::new(self.coeffs.iter().map(|c| c.d).collect())
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, o: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, o: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, o: Self) -> Polynomial<T> {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $m(self, o: Self) -> Polynomial<T> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Complex coefficient serialized as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub [f64; 2]);

impl From<Complex64> for Pair {
    fn from(c: Complex64) -> Self {
        Pair([c.re, c.im])
    }
}

impl From<Pair> for Complex64 {
    fn from(p: Pair) -> Self {
        Complex64::new(p.0[0], p.0[1])
    }
}

impl Serialize for Polynomial<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Pair> = self.coeffs.iter().map(|&c| c.into()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Pair>::deserialize(d)?;
        Ok(Polynomial::new(v.into_iter().map(Complex64::from).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval_real(2.0), c(3.0, 0.0));
        let z: Polynomial = Polynomial::zero();
        assert_eq!(z.eval_real(7.0), c(0.0, 0.0));
        assert_eq!(z.degree(), None);
        let k = Polynomial::from_real(&[5.0]);
        assert_eq!(k.eval(c(3.0, 4.0)), c(5.0, 0.0));
    }

    #[test]
    fn division_examples() {
        let num = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let den = Polynomial::from_real(&[-1.0, 1.0]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0]));
        assert!(r.is_zero());

        let (q, r) = Polynomial::from_real(&[0.0, 0.0, 1.0]).div_rem(&den).unwrap();
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0]));
        assert_eq!(r, Polynomial::from_real(&[1.0]));

        let q1 = c(0.3, -1.7);
        let num = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), -q1, c(1.0, 0.0)]);
        let den = Polynomial::new(vec![-q1, c(1.0, 0.0)]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert!((&q - &Polynomial::from_real(&[0.0, 0.0, 1.0])).norm_inf() < 1e-15);
        assert!(r.norm_inf() < 1e-15);

        assert_eq!(num.div_rem(&Polynomial::zero()), Err(Error::DivisionByZeroPolynomial));
    }

    #[test]
    fn from_roots_expands_product() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(p, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        let roots = [c(0.5, 1.0), c(-2.0, 0.3), c(1.1, -0.4)];
        let p = Polynomial::from_roots(&roots);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-14);
        }
        let x = c(0.37, 0.21);
        let direct: Complex64 = roots.iter().map(|&r| x - r).product();
        assert!((p.eval(x) - direct).norm() < 1e-14);
    }

    #[test]
    fn trims_roundoff_leading_terms() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-14, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        let sum = &Polynomial::from_real(&[1.0, 1.0]) - &Polynomial::from_real(&[0.0, 1.0]);
        assert_eq!(sum.degree(), Some(0));
    }

    #[test]
    fn dual_coefficients_carry_rates() {
        // (x - Q(t))^2 with Q = 2, Q' = 3: d/dt coefficient of x^1 is -2 Q' = -6
        let q = Dual::new(c(2.0, 0.0), c(3.0, 0.0));
        let p = Polynomial::from_roots(&[q, q]);
        let rate = p.rate_part();
        assert_eq!(rate.coeff(1), c(-6.0, 0.0));
        assert_eq!(rate.coeff(0), c(12.0, 0.0));
    }

    fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..=max_deg + 1)
    }

    proptest! {
        #[test]
        fn div_rem_round_trip(pc in poly_strategy(8), dc in poly_strategy(8)) {
            let p = Polynomial::new(pc.iter().map(|&(a, b)| c(a, b)).collect());
            let mut dv: Vec<Complex64> = dc.iter().map(|&(a, b)| c(a, b)).collect();
            dv.truncate(p.coeffs().len().max(1));
            if let Some(last) = dv.last_mut() {
                // keep the divisor well away from degenerate leading terms
                if last.norm() < 0.5 { *last += c(1.0, 0.0); }
            }
            let d = Polynomial::new(dv);
            prop_assume!(!p.is_zero() && !d.is_zero());
            let (q, r) = p.div_rem(&d).unwrap();
            let back = &(&q * &d) + &r;
            prop_assert!((&p - &back).norm_inf() <= 1e-10 * p.norm_inf().max(1.0) * q.norm_inf().max(1.0));
            if let (Some(rd), Some(dd)) = (r.degree(), d.degree()) {
                prop_assert!(rd < dd);
            }
        }
    }
}
