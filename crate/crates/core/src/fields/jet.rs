use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Second-order Taylor jet of a scalar field at a point `(t, x)`:
/// value plus the partials `∂_t`, `∂_x`, `∂_tt`, `∂_tx`, `∂_xx`.
///
/// The jet algebra is closed under pointwise arithmetic and composition
/// with smooth functions, so evaluating a closed-form expression on jets
/// yields exact partials (up to roundoff). [`Jet::dx`] and [`Jet::dt`] turn
/// a second-order jet into a first-order one; the second-order slots of the
/// result are unknown.
///
/// A component that a producer cannot supply is NaN. NaN only leaks into
/// components that depend on it, e.g. a missing `tt` never pollutes `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub t: Complex64,
    pub x: Complex64,
    pub tt: Complex64,
    pub tx: Complex64,
    pub xx: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const NAN: Complex64 = Complex64::new(f64::NAN, f64::NAN);

pub(crate) fn finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

impl Jet {
    pub const fn new(v: Complex64, t: Complex64, x: Complex64, tt: Complex64, tx: Complex64, xx: Complex64) -> Self {
        Self { v, t, x, tt, tx, xx }
    }

    pub fn constant(v: impl Into<Complex64>) -> Self {
        Self::new(v.into(), ZERO, ZERO, ZERO, ZERO, ZERO)
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// The coordinate function `t`.
    pub fn var_t(t: f64) -> Self {
        Self::new(t.into(), ONE, ZERO, ZERO, ZERO, ZERO)
    }

    /// The coordinate function `x`.
    pub fn var_x(x: f64) -> Self {
        Self::new(x.into(), ZERO, ONE, ZERO, ZERO, ZERO)
    }

    /// A function of `t` alone with value `v`, rate `dt` and second rate `dtt`
    /// (pass NaN when unknown).
    pub fn of_time(v: Complex64, dt: Complex64, dtt: Complex64) -> Self {
        Self::new(v, dt, ZERO, dtt, ZERO, ZERO)
    }

    /// Value and x-partials only; every time slot unknown.
    pub fn of_space(v: Complex64, x: Complex64, xx: Complex64) -> Self {
        Self::new(v, NAN, x, NAN, NAN, xx)
    }

    pub fn has_time_derivative(&self) -> bool {
        finite(self.t)
    }

    /// `∂_x` as a first-order jet.
    pub fn dx(self) -> Self {
        Self::new(self.x, self.tx, self.xx, NAN, NAN, NAN)
    }

    /// `∂_t` as a first-order jet.
    pub fn dt(self) -> Self {
        Self::new(self.t, self.tt, self.tx, NAN, NAN, NAN)
    }

    /// Chain rule for `g(self)` given `g`, `g'`, `g''` at the value.
    pub fn compose(self, g: Complex64, g1: Complex64, g2: Complex64) -> Self {
        Self::new(
            g,
            g1 * self.t,
            g1 * self.x,
            g2 * self.t * self.t + g1 * self.tt,
            g2 * self.t * self.x + g1 * self.tx,
            g2 * self.x * self.x + g1 * self.xx,
        )
    }

    pub fn recip(self) -> Self {
        let inv = self.v.inv();
        self.compose(inv, -inv * inv, inv * inv * inv * 2.0)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(ONE),
            1 => self,
            _ => {
                let nf = f64::from(n);
                let vn2 = self.v.powi(n - 2);
                self.compose(vn2 * self.v * self.v, vn2 * self.v * nf, vn2 * nf * (nf - 1.0))
            }
        }
    }

    pub fn powc(self, p: Complex64) -> Self {
        let g = self.v.powc(p);
        let g1 = p * self.v.powc(p - 1.0);
        let g2 = p * (p - 1.0) * self.v.powc(p - 2.0);
        self.compose(g, g1, g2)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = self.v.inv();
        self.compose(self.v.ln(), inv, -inv * inv)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.compose(c, -s, -c)
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::new(self.v * k, self.t * k, self.x * k, self.tt * k, self.tx * k, self.xx * k)
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.t + o.t, self.x + o.x, self.tt + o.tt, self.tx + o.tx, self.xx + o.xx)
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.v * o.v,
            self.t * o.v + self.v * o.t,
            self.x * o.v + self.v * o.x,
            self.tt * o.v + self.t * o.t * 2.0 + self.v * o.tt,
            self.tx * o.v + self.t * o.x + self.x * o.t + self.v * o.tx,
            self.xx * o.v + self.x * o.x * 2.0 + self.v * o.xx,
        )
    }
}

impl Div for Jet {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

macro_rules! scalar_ops {
    ($ty:ty) => {
        impl Add<$ty> for Jet {
            type Output = Jet;
            fn add(self, o: $ty) -> Jet {
                Jet { v: self.v + o, ..self }
            }
        }
        impl Sub<$ty> for Jet {
            type Output = Jet;
            fn sub(self, o: $ty) -> Jet {
                Jet { v: self.v - o, ..self }
            }
        }
        impl Mul<$ty> for Jet {
            type Output = Jet;
            fn mul(self, o: $ty) -> Jet {
                self.scale(Complex64::from(o))
            }
        }
        impl Div<$ty> for Jet {
            type Output = Jet;
            fn div(self, o: $ty) -> Jet {
                self.scale(Complex64::from(o).inv())
            }
        }
    };
}
scalar_ops!(f64);
scalar_ops!(Complex64);

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn quotient_matches_closed_form() {
        // f(t,x) = t / (x^2 + 1)
        let (t, x) = (0.7, -1.3);
        let f = Jet::var_t(t) / (Jet::var_x(x) * Jet::var_x(x) + 1.0);
        let d = x * x + 1.0;
        assert!(close(f.v, (t / d).into(), 1e-15));
        assert!(close(f.t, (1.0 / d).into(), 1e-15));
        assert!(close(f.x, (-2.0 * t * x / (d * d)).into(), 1e-14));
        assert!(close(f.tt, ZERO, 1e-15));
        assert!(close(f.tx, (-2.0 * x / (d * d)).into(), 1e-14));
        let fxx = t * (6.0 * x * x - 2.0) / (d * d * d);
        assert!(close(f.xx, fxx.into(), 1e-14));
    }

    #[test]
    fn mixed_partials_of_product() {
        // f = sin(t x) : f_tx = cos(tx) - t x sin(tx), f_tt = -x^2 sin(tx)
        let (t, x) = (0.4, 1.7);
        let f = (Jet::var_t(t) * Jet::var_x(x)).sin();
        let s = (t * x).sin();
        let c = (t * x).cos();
        assert!(close(f.tx, (c - t * x * s).into(), 1e-14));
        assert!(close(f.tt, (-x * x * s).into(), 1e-14));
        let d = f.dx();
        assert!(close(d.v, (t * c).into(), 1e-14));
        assert!(close(d.t, (c - t * x * s).into(), 1e-14));
        assert!(d.tt.re.is_nan());
    }

    #[test]
    fn elementary_functions_against_finite_differences() {
        let h = 1e-4;
        let fun = |x: f64| (Jet::var_x(x).sin() * Jet::var_x(x).exp() + Jet::var_x(x).sqrt()).ln();
        let x0 = 0.9;
        let j = fun(x0);
        let fd1 = (fun(x0 + h).v - fun(x0 - h).v) / (2.0 * h);
        let fd2 = (fun(x0 + h).v - j.v * 2.0 + fun(x0 - h).v) / (h * h);
        assert!(close(j.x, fd1, 1e-7));
        assert!(close(j.xx, fd2, 1e-6));
        let p = Jet::var_x(x0).powc(Complex64::new(2.5, 0.0));
        assert!(close(p.xx, (2.5 * 1.5 * x0.powf(0.5)).into(), 1e-14));
        assert!(close(Jet::var_x(x0).powi(3).xx, (6.0 * x0).into(), 1e-14));
    }

    #[test]
    fn missing_time_rate_stays_contained() {
        let a = Jet::of_time(ONE * 2.0, ONE, NAN);
        let f = (a * Jet::var_x(0.3)).recip();
        assert!(finite(f.t) && finite(f.x) && finite(f.tx) && finite(f.xx));
        assert!(f.tt.re.is_nan());
    }
}
