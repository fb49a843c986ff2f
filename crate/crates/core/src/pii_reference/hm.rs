use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::airy::airy;
use super::cheb;
use crate::error::{Error, Result};
use crate::fields::Jet;

/// The solver always covers at least this window so that both asymptotic
/// boundary conditions are accurate.
pub const DEFAULT_WINDOW: (f64, f64) = (-10.0, 8.0);
pub const DEFAULT_POINTS: usize = 1801;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Element width for the multi-domain collocation.
const ELEMENT_WIDTH: f64 = 1.5;
/// Nodes per element, tried in turn until the spectral tails resolve.
const LADDER: [usize; 5] = [12, 16, 24, 32, 40];
const MAX_NEWTON: usize = 60;

/// Hastings–McLeod solution of `q'' = tq + 2q³` on a uniform table, with
/// `u' = -q²`, `u(+∞) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMSolution {
    pub t_grid: Vec<f64>,
    pub q: Vec<f64>,
    pub qprime: Vec<f64>,
    pub u: Vec<f64>,
    /// Independent second derivative: spectral for solver output, a
    /// finite difference of `qprime` for loaded tables.
    pub qsecond: Vec<f64>,
}

/// Interpolated values at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HmPoint {
    pub q: f64,
    pub qp: f64,
    pub qpp: f64,
    pub u: f64,
}

/// Worst-case violations of the defining properties over the table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmInvariants {
    pub min_q: f64,
    /// `max |q'' - tq - 2q³|`
    pub ode_residual: f64,
    /// `max |u - (q'² - tq² - q⁴)|`
    pub u_relation: f64,
}

impl HmInvariants {
    /// Which property fails first, checked in the order ODE, positivity, u.
    pub fn first_failure(&self, tol: f64) -> Option<&'static str> {
        if !(self.ode_residual <= tol) {
            Some("ode_residual")
        } else if !(self.min_q > 0.0) {
            Some("positivity")
        } else if !(self.u_relation <= tol) {
            Some("u_relation")
        } else {
            None
        }
    }
}

/// `√(-t/2)(1 + 1/(8t³) - 73/(128t⁶) + 10657/(1024t⁹))`, the t → -∞ expansion.
pub fn left_asymptotic(t: f64) -> f64 {
    let t3 = t * t * t;
    (-t / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * t3) - 73.0 / (128.0 * t3 * t3) + 10657.0 / (1024.0 * t3 * t3 * t3))
}

fn initial_guess(t: f64) -> f64 {
    if t >= 0.0 {
        airy(t).0
    } else {
        let a0 = airy(0.0).0;
        (a0 * a0 - t / 2.0).sqrt()
    }
}

/// Piecewise Chebyshev representation of the solution.
struct Pieces {
    breaks: Vec<f64>,
    n: usize,
    /// per element: coefficients of q (reference variable)
    coeffs: Vec<Vec<f64>>,
}

impl Pieces {
    fn element(&self, t: f64) -> usize {
        let m = self.breaks.len() - 1;
        self.breaks[1..m].partition_point(|b| *b <= t)
    }

    fn reference(&self, e: usize, t: f64) -> (f64, f64) {
        let (a, b) = (self.breaks[e], self.breaks[e + 1]);
        ((2.0 * t - a - b) / (b - a), 2.0 / (b - a))
    }

    /// `(q, q', q'')` at `t`.
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let e = self.element(t);
        let (x, s) = self.reference(e, t);
        let c = &self.coeffs[e];
        let d1 = cheb::derivative(c);
        let d2 = cheb::derivative(&d1);
        (cheb::clenshaw(c, x), s * cheb::clenshaw(&d1, x), s * s * cheb::clenshaw(&d2, x))
    }

    /// `u(t) = ∫_t^b q² + tail`, evaluated at sorted `ts`.
    fn u_values(&self, ts: &[f64], tail: f64) -> Vec<f64> {
        let m = self.breaks.len() - 1;
        // antiderivatives of q² per element, in t units
        let anti: Vec<Vec<f64>> = (0..m)
            .map(|e| {
                let nodes = cheb::nodes(2 * self.n, -1.0, 1.0);
                let sq: Vec<f64> = nodes.iter().map(|x| cheb::clenshaw(&self.coeffs[e], *x).powi(2)).collect();
                let half = (self.breaks[e + 1] - self.breaks[e]) / 2.0;
                cheb::antiderivative(&cheb::coefficients(&sq)).into_iter().map(|v| v * half).collect()
            })
            .collect();
        let whole: Vec<f64> = anti.iter().map(|a| cheb::clenshaw(a, 1.0) - cheb::clenshaw(a, -1.0)).collect();
        // suffix sums: integral from the right break of element e to b
        let mut right_of = vec![0.0; m];
        for e in (0..m - 1).rev() {
            right_of[e] = right_of[e + 1] + whole[e + 1];
        }
        ts.iter()
            .map(|&t| {
                let e = self.element(t);
                let (x, _) = self.reference(e, t);
                let a = &anti[e];
                tail + right_of[e] + cheb::clenshaw(a, 1.0) - cheb::clenshaw(a, x)
            })
            .collect()
    }
}

/// Collocation system for one ladder level.
struct Collocation {
    breaks: Vec<f64>,
    n: usize,
    t: Vec<f64>,
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
    left: f64,
    right: f64,
}

impl Collocation {
    fn new(a: f64, b: f64, n: usize) -> Self {
        let m = ((b - a) / ELEMENT_WIDTH).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
        let h = breaks[1] - breaks[0];
        let d1 = cheb::diff_matrix(n, 0.0, h);
        let d2 = cheb::matmul(&d1, &d1);
        let t = (0..m).flat_map(|e| cheb::nodes(n, breaks[e], breaks[e + 1])).collect();
        Self { breaks, n, t, d1, d2, left: left_asymptotic(a), right: airy(b).0 }
    }

    fn m(&self) -> usize {
        self.breaks.len() - 1
    }

    fn size(&self) -> usize {
        self.m() * (self.n + 1)
    }

    /// Residual vector and Jacobian at `q`. Within an element, node 0 is
    /// the right end and node n the left end.
    fn system(&self, q: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let (n, m) = (self.n, self.m());
        let size = self.size();
        let mut f = DVector::zeros(size);
        let mut jac = DMatrix::zeros(size, size);
        for e in 0..m {
            let o = e * (n + 1);
            for i in 1..n {
                let row = o + i;
                let (ti, qi) = (self.t[row], q[row]);
                let mut acc = -ti * qi - 2.0 * qi * qi * qi;
                for j in 0..=n {
                    acc += self.d2[i][j] * q[o + j];
                    jac[(row, o + j)] = self.d2[i][j];
                }
                jac[(row, row)] -= ti + 6.0 * qi * qi;
                f[row] = acc;
            }
            // right end of element e: continuity of q with element e+1, or the Airy condition
            let row = o;
            if e + 1 < m {
                let r = (e + 1) * (n + 1) + n;
                f[row] = q[o] - q[r];
                jac[(row, o)] = 1.0;
                jac[(row, r)] = -1.0;
            } else {
                f[row] = q[o] - self.right;
                jac[(row, o)] = 1.0;
            }
            // left end of element e: continuity of q' with element e-1, or the left asymptotics
            let row = o + n;
            if e > 0 {
                let p = (e - 1) * (n + 1);
                let mut acc = 0.0;
                for j in 0..=n {
                    acc += self.d1[n][j] * q[o + j] - self.d1[0][j] * q[p + j];
                    jac[(row, o + j)] += self.d1[n][j];
                    jac[(row, p + j)] -= self.d1[0][j];
                }
                f[row] = acc;
            } else {
                f[row] = q[row] - self.left;
                jac[(row, row)] = 1.0;
            }
        }
        (f, jac)
    }

    fn newton(&self, mut q: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
        let (mut f, mut jac) = self.system(&q);
        for _ in 0..MAX_NEWTON {
            let delta = jac.clone().lu().solve(&(-&f))?;
            if delta.amax() <= tol {
                // converged to roundoff: take the step without a line search
                return Some(q.iter().zip(delta.iter()).map(|(a, d)| a + d).collect());
            }
            let fnorm = f.norm();
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = q.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
                let (ft, jt) = self.system(&trial);
                if ft.norm() <= (1.0 - lambda / 4.0) * fnorm || ft.norm() < 1e-13 {
                    q = trial;
                    f = ft;
                    jac = jt;
                    break;
                }
                lambda /= 2.0;
                if lambda < 1.0 / 1024.0 {
                    return None;
                }
            }
        }
        None
    }

    fn pieces(&self, q: &[f64]) -> Pieces {
        let n = self.n;
        Pieces {
            breaks: self.breaks.clone(),
            n,
            coeffs: (0..self.m()).map(|e| cheb::coefficients(&q[e * (n + 1)..(e + 1) * (n + 1)])).collect(),
        }
    }
}

/// Largest trailing-coefficient magnitude (last three) over all elements.
fn tail_size(p: &Pieces) -> f64 {
    p.coeffs.iter().map(|c| c[c.len() - 3..].iter().map(|v| v.abs()).fold(0.0, f64::max)).fold(0.0, f64::max)
}

/// Solves the Hastings–McLeod boundary-value problem and tabulates
/// `(q, q', u)` on `n_points` uniform times in `[t_min, t_max]`.
///
/// The collocation domain is `[t_min, t_max]` widened to at least
/// [`DEFAULT_WINDOW`]; the right boundary value is `Ai`, the left one the
/// four-term asymptotic series. `u` is the backward quadrature of `q²`
/// closed by `∫_T^∞ Ai² = Ai'(T)² - T Ai(T)²`.
pub fn solve_hastings_mcleod(t_min: f64, t_max: f64, n_points: usize, tol: f64) -> Result<HMSolution> {
    if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidInput(format!("need t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if !(tol >= 1e-12) {
        return Err(Error::InvalidInput(format!("tolerance {tol} below 1e-12")));
    }
    if n_points < 2 {
        return Err(Error::InvalidInput("need at least two table points".into()));
    }
    let (a, b) = (t_min.min(DEFAULT_WINDOW.0), t_max.max(DEFAULT_WINDOW.1));
    let mut previous: Option<Pieces> = None;
    for (level, &n) in LADDER.iter().enumerate() {
        let col = Collocation::new(a, b, n);
        let guess: Vec<f64> = match &previous {
            Some(p) => col.t.iter().map(|t| p.eval(*t).0).collect(),
            None => col.t.iter().map(|t| initial_guess(*t)).collect(),
        };
        let q = col.newton(guess, tol).ok_or(Error::HmContinuationFailed { level })?;
        let pieces = col.pieces(&q);
        if tail_size(&pieces) <= tol {
            return Ok(tabulate(&pieces, b, t_min, t_max, n_points));
        }
        previous = Some(pieces);
    }
    Err(Error::HmContinuationFailed { level: LADDER.len() })
}

fn tabulate(p: &Pieces, b: f64, t_min: f64, t_max: f64, n_points: usize) -> HMSolution {
    let t_grid: Vec<f64> = (0..n_points).map(|i| t_min + (t_max - t_min) * i as f64 / (n_points - 1) as f64).collect();
    let (ai, aip) = airy(b);
    let tail = aip * aip - b * ai * ai;
    let u = p.u_values(&t_grid, tail);
    let vals: Vec<(f64, f64, f64)> = t_grid.iter().map(|t| p.eval(*t)).collect();
    HMSolution {
        q: vals.iter().map(|v| v.0).collect(),
        qprime: vals.iter().map(|v| v.1).collect(),
        qsecond: vals.iter().map(|v| v.2).collect(),
        u,
        t_grid,
    }
}

/// Quintic Hermite interpolation on `[0, 1]` from value, first and second
/// derivative (already scaled by h, h²) at both ends.
fn hermite5(s: f64, f0: [f64; 3], f1: [f64; 3]) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h20 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h21 = 0.5 * (s3 - 2.0 * s4 + s5);
    h00 * f0[0] + h10 * f0[1] + h20 * f0[2] + h01 * f1[0] + h11 * f1[1] + h21 * f1[2]
}

impl HMSolution {
    pub fn range(&self) -> (f64, f64) {
        (self.t_grid[0], *self.t_grid.last().unwrap())
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.range();
        t >= lo && t <= hi
    }

    /// Interpolated `(q, q', q'', u)`. Between nodes, `q`, `q'` and `u` use
    /// quintic Hermite data completed by the ODE (`q'' = tq + 2q³`,
    /// `q''' = q + tq' + 6q²q'`, `u' = -q²`, `u'' = -2qq'`), and `q''` is
    /// taken from the ODE at the interpolated point.
    pub fn eval(&self, t: f64) -> Result<HmPoint> {
        let (lo, hi) = self.range();
        if !self.contains(t) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let n = self.t_grid.len();
        let i = self.t_grid.partition_point(|s| *s <= t).clamp(1, n - 1) - 1;
        let (t0, t1) = (self.t_grid[i], self.t_grid[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let data = |k: usize| {
            let (tk, q, qp) = (self.t_grid[k], self.q[k], self.qprime[k]);
            let qpp = tk * q + 2.0 * q * q * q;
            let qppp = q + tk * qp + 6.0 * q * q * qp;
            ([q, qp * h, qpp * h * h], [qp, qpp * h, qppp * h * h], [self.u[k], -q * q * h, -2.0 * q * qp * h * h])
        };
        let (a, b) = (data(i), data(i + 1));
        let q = hermite5(s, a.0, b.0);
        let qp = hermite5(s, a.1, b.1);
        let u = hermite5(s, a.2, b.2);
        Ok(HmPoint { q, qp, qpp: t * q + 2.0 * q * q * q, u })
    }

    /// Time jets of `q`, `q'` and `u` at `t` (second rates included).
    pub fn jets(&self, t: f64) -> Result<[Jet; 3]> {
        let p = self.eval(t)?;
        let c = |v: f64| Complex64::new(v, 0.0);
        let qppp = p.q + t * p.qp + 6.0 * p.q * p.q * p.qp;
        Ok([
            Jet::of_time(c(p.q), c(p.qp), c(p.qpp)),
            Jet::of_time(c(p.qp), c(p.qpp), c(qppp)),
            Jet::of_time(c(p.u), c(-p.q * p.q), c(-2.0 * p.q * p.qp)),
        ])
    }

    pub fn invariants(&self) -> HmInvariants {
        let mut inv = HmInvariants { min_q: f64::INFINITY, ode_residual: 0.0, u_relation: 0.0 };
        for k in 0..self.t_grid.len() {
            let (t, q, qp) = (self.t_grid[k], self.q[k], self.qprime[k]);
            inv.min_q = inv.min_q.min(q);
            let ode = (self.qsecond[k] - t * q - 2.0 * q * q * q).abs();
            inv.ode_residual = inv.ode_residual.max(if ode.is_nan() { f64::INFINITY } else { ode });
            let rel = (self.u[k] - (qp * qp - t * q * q - q.powi(4))).abs();
            inv.u_relation = inv.u_relation.max(if rel.is_nan() { f64::INFINITY } else { rel });
        }
        inv
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["t", "q", "qprime", "u"]).map_err(io)?;
        for k in 0..self.t_grid.len() {
            w.write_record([self.t_grid[k], self.q[k], self.qprime[k], self.u[k]].map(|v| format!("{v:e}")))
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `t, q, qprime, u` table on a uniform grid; `q''` is
    /// recovered by fourth-order differences of `qprime`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header: Vec<String> =
            r.headers().map_err(|e| Error::Io(e.to_string()))?.iter().map(str::to_string).collect();
        if header != ["t", "q", "qprime", "u"] {
            return Err(Error::InvalidInput(format!("unexpected HM table header {header:?}")));
        }
        let mut cols: [Vec<f64>; 4] = Default::default();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            for (c, field) in cols.iter_mut().zip(rec.iter()) {
                c.push(field.parse().map_err(|_| Error::InvalidInput(format!("bad number {field:?}")))?);
            }
        }
        let [t_grid, q, qprime, u] = cols;
        if t_grid.len() < 5 {
            return Err(Error::InvalidInput("HM table needs at least 5 rows".into()));
        }
        let h = (t_grid[t_grid.len() - 1] - t_grid[0]) / (t_grid.len() - 1) as f64;
        if !(h > 0.0) || t_grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * (1.0 + h)) {
            return Err(Error::InvalidInput("HM table times must be uniform and increasing".into()));
        }
        let qsecond = fd_first(&qprime, h);
        Ok(Self { t_grid, q, qprime, u, qsecond })
    }
}

/// Fourth-order first derivative on a uniform grid, one-sided at the ends.
fn fd_first(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
            } else if i < 2 {
                let s = &f[i..i + 5];
                let d = (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
                if i == 0 {
                    d
                } else {
                    (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
                }
            } else if i + 1 == n {
                let s = &f[n - 5..];
                (25.0 * s[4] - 48.0 * s[3] + 36.0 * s[2] - 16.0 * s[1] + 3.0 * s[0]) / (12.0 * h)
            } else {
                (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h)
            }
        })
        .collect()
}
