use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Coefficient type for [`Polynomial`](super::Polynomial).
///
/// Implemented for plain complex numbers and for [`Dual`], which carries a
/// first time derivative alongside each value.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(c: Complex64) -> Self;
    fn from_f64(v: f64) -> Self {
        Self::from_c64(Complex64::new(v, 0.0))
    }
    /// Size used for trimming and norms.
    fn magnitude(&self) -> f64;
    /// The value part (drops any derivative information).
    fn value(&self) -> Complex64;
    fn is_finite(&self) -> bool;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_c64(c: Complex64) -> Self {
        c
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn value(&self) -> Complex64 {
        *self
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Forward-mode dual number `v + d·ε`, ε² = 0, over the complex field.
///
/// Used to push time derivatives of particle coordinates through the Lax
/// construction: seed `d` with the rate of change of each input.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual {
    pub v: Complex64,
    pub d: Complex64,
}

impl Dual {
    pub fn new(v: Complex64, d: Complex64) -> Self {
        Self { v, d }
    }

    pub fn constant(v: Complex64) -> Self {
        Self { v, d: Complex64::new(0.0, 0.0) }
    }

    pub fn recip(self) -> Self {
        let inv = self.v.inv();
        Self { v: inv, d: -self.d * inv * inv }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let vn1 = self.v.powi(n - 1);
        Self { v: vn1 * self.v, d: self.d * vn1 * f64::from(n) }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Self::new(q, (self.d - q * o.d) / o.v)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Scalar for Dual {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }
    fn from_c64(c: Complex64) -> Self {
        Self::constant(c)
    }
    fn magnitude(&self) -> f64 {
        self.v.norm().max(self.d.norm())
    }
    fn value(&self) -> Complex64 {
        self.v
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dual_product_and_quotient_rules() {
        // f = t^2 at t = 1.5 + 0.5i, g = 1/f
        let t = Dual::new(c(1.5, 0.5), c(1.0, 0.0));
        let f = t * t;
        assert!((f.d - t.v * 2.0).norm() < 1e-15);
        let g = Dual::one() / f;
        let expected = -t.v.powi(-3) * 2.0;
        assert!((g.d - expected).norm() < 1e-14);
        assert!((f.recip().d - expected).norm() < 1e-14);
        assert!((t.powi(3).d - t.v * t.v * 3.0).norm() < 1e-14);
    }
}
