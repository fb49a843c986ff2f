//! Dormand–Prince 5(4) with step-size control and continuous extension,
//! over complex state vectors and real time (either direction).

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrator settings.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible |h|; breaching it aborts the run.
    pub h_min: f64,
    /// Largest admissible |h| (0 = unbounded).
    pub h_max: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, h_min: 1e-12, h_max: 0.0, max_steps: 200_000 }
    }
}

/// Continuous extension over one accepted step.
#[derive(Clone, Debug)]
pub struct DenseSegment {
    pub t0: f64,
    pub t1: f64,
    rc: [Vec<C>; 5],
}

impl DenseSegment {
    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.t0 <= self.t1 { (self.t0, self.t1) } else { (self.t1, self.t0) };
        (lo..=hi).contains(&t)
    }

    /// Fourth-order interpolant at `t` within the step.
    pub fn eval(&self, t: f64) -> Vec<C> {
        let th = (t - self.t0) / (self.t1 - self.t0);
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rc;
        (0..r1.len()).map(|i| r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * th1) * th) * th1) * th).collect()
    }
}

/// Accepted nodes plus the dense output between them.
#[derive(Clone, Debug)]
pub struct Solution {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<C>>,
    pub segments: Vec<DenseSegment>,
}

impl Solution {
    pub fn last(&self) -> (&f64, &Vec<C>) {
        (self.ts.last().unwrap(), self.ys.last().unwrap())
    }

    /// Dense-output evaluation anywhere in the covered interval.
    pub fn eval(&self, t: f64) -> Option<Vec<C>> {
        if self.segments.is_empty() {
            return (t == self.ts[0]).then(|| self.ys[0].clone());
        }
        let forward = self.ts[self.ts.len() - 1] >= self.ts[0];
        // segments are ordered along the integration direction
        let idx = self.segments.partition_point(|s| if forward { s.t1 < t } else { s.t1 > t });
        let seg = self.segments.get(idx)?;
        seg.contains(t).then(|| seg.eval(t))
    }
}

fn axpy(y: &[C], h: f64, terms: &[(&[C], f64)]) -> Vec<C> {
    let mut out = y.to_vec();
    for (k, a) in terms {
        if *a == 0.0 {
            continue;
        }
        let s = h * a;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * s;
        }
    }
    out
}

fn rms_norm(v: &[C], scale: &[f64]) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter().zip(scale).map(|(e, s)| (e.norm() / s).powi(2)).sum::<f64>() / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` to `t_end`.
///
/// `accept(t, y)` may veto a trial step end (e.g. a near-collision); the
/// step is then halved. If the step falls below `h_min` the run aborts with
/// [`Error::CollisionEncountered`] when the last rejection came from the
/// veto, else [`Error::StepUnderflow`].
pub fn integrate<F, A>(mut f: F, t0: f64, y0: &[C], t_end: f64, opts: &Options, mut accept: A) -> Result<Solution>
where
    F: FnMut(f64, &[C]) -> Result<Vec<C>>,
    A: FnMut(f64, &[C]) -> bool,
{
    let mut sol = Solution { ts: vec![t0], ys: vec![y0.to_vec()], segments: Vec::new() };
    if t_end == t0 {
        return Ok(sol);
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let h_max = if opts.h_max > 0.0 { opts.h_max.min(span) } else { span };

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&mut f, t, &y, &k1, dir, span, opts)?.min(h_max);
    let mut last_vetoed = false;
    let mut reject_streak = false;

    for _ in 0..opts.max_steps {
        if h < opts.h_min {
            return Err(if last_vetoed { Error::CollisionEncountered { t } } else { Error::StepUnderflow { t } });
        }
        let last = (t_end - t).abs() <= h * (1.0 + 1e-12);
        let hs = if last { t_end - t } else { dir * h };

        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(&k1, A21)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(&k1, A31), (&k2, A32)]))?;
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(&k1, A41), (&k2, A42), (&k3, A43)]))?;
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]))?;
        let y6 = axpy(&y, hs, &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)]);
        let t_new = if last { t_end } else { t + hs };
        let k6 = f(t + hs, &y6)?;
        let y_new = axpy(&y, hs, &[(&k1, A71), (&k3, A73), (&k4, A74), (&k5, A75), (&k6, A76)]);
        let k7 = f(t_new, &y_new)?;

        let err_vec = axpy(
            &vec![C::new(0.0, 0.0); y.len()],
            hs,
            &[(&k1, E1), (&k3, E3), (&k4, E4), (&k5, E5), (&k6, E6), (&k7, E7)],
        );
        let scale: Vec<f64> =
            y.iter().zip(&y_new).map(|(a, b)| opts.atol + opts.rtol * a.norm().max(b.norm())).collect();
        let err = rms_norm(&err_vec, &scale);

        if !err.is_finite() || err > 1.0 {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            last_vetoed = false;
            reject_streak = true;
            continue;
        }
        if !accept(t_new, &y_new) {
            h *= 0.5;
            last_vetoed = true;
            reject_streak = true;
            continue;
        }
        last_vetoed = false;

        let ydiff: Vec<C> = y_new.iter().zip(&y).map(|(a, b)| a - b).collect();
        let bspl: Vec<C> = k1.iter().zip(&ydiff).map(|(k, d)| k * hs - d).collect();
        let rc4: Vec<C> = ydiff.iter().zip(&k7).zip(&bspl).map(|((d, k), b)| d - k * hs - b).collect();
        let rc5 = axpy(
            &vec![C::new(0.0, 0.0); y.len()],
            hs,
            &[(&k1, D1), (&k3, D3), (&k4, D4), (&k5, D5), (&k6, D6), (&k7, D7)],
        );
        sol.segments.push(DenseSegment { t0: t, t1: t_new, rc: [y.clone(), ydiff, bspl, rc4, rc5] });
        sol.ts.push(t_new);
        sol.ys.push(y_new.clone());
        if last {
            return Ok(sol);
        }
        t = t_new;
        y = y_new;
        k1 = k7;

        let mut fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
        if reject_streak {
            fac = fac.min(1.0);
        }
        reject_streak = false;
        h = (h * fac).min(h_max);
    }
    Err(Error::StepUnderflow { t })
}

fn initial_step<F>(f: &mut F, t: f64, y: &[C], f0: &[C], dir: f64, span: f64, opts: &Options) -> Result<f64>
where
    F: FnMut(f64, &[C]) -> Result<Vec<C>>,
{
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let d0 = rms_norm(y, &scale);
    let d1 = rms_norm(f0, &scale);
    // the probe step stays inside the interval: callers may not be defined past it
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let y1 = axpy(y, dir * h0, &[(f0, 1.0)]);
    let f1 = f(t + dir * h0, &y1)?;
    let diff: Vec<C> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_norm(&diff, &scale) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).max(opts.h_min * 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> C {
        C::new(v, 0.0)
    }

    #[test]
    fn exponential_growth_accuracy_and_dense_output() {
        let opts = Options::new(1e-11, 1e-13);
        let sol = integrate(|_, y| Ok(vec![y[0]]), 0.0, &[c(1.0)], 2.0, &opts, |_, _| true).unwrap();
        let (t, y) = sol.last();
        assert_eq!(*t, 2.0);
        assert!((y[0] - 2f64.exp()).norm() < 1e-9);
        for tq in [0.013, 0.77, 1.5, 1.999] {
            let v = sol.eval(tq).unwrap();
            assert!((v[0] - tq.exp()).norm() < 1e-8, "dense at {tq}");
        }
    }

    #[test]
    fn harmonic_oscillator_backwards_complex() {
        // y'' = -y as a system, complex initial data, integrated to t = -3
        let opts = Options::new(1e-12, 1e-14);
        let y0 = [C::new(1.0, 0.5), C::new(0.0, -1.0)];
        let sol = integrate(|_, y| Ok(vec![y[1], -y[0]]), 0.0, &y0, -3.0, &opts, |_, _| true).unwrap();
        let (_, y) = sol.last();
        let exact = y0[0] * (-3f64).cos() + y0[1] * (-3f64).sin();
        assert!((y[0] - exact).norm() < 1e-10);
        assert!(sol.eval(-1.2).is_some());
        assert!(sol.eval(0.5).is_none());
    }

    #[test]
    fn fifth_order_convergence() {
        // with fixed h (huge tolerance, h_max), global error ~ h^5
        let err_at = |h: f64| {
            let mut o = Options::new(1.0, 1.0);
            o.h_max = h;
            let s = integrate(|t, y| Ok(vec![y[0] * t.cos()]), 0.0, &[c(1.0)], 1.0, &o, |_, _| true).unwrap();
            (s.last().1[0] - 1f64.sin().exp()).norm()
        };
        let ratio = err_at(0.1) / err_at(0.05);
        assert!(ratio > 24.0 && ratio < 50.0, "ratio {ratio}");
    }

    #[test]
    fn veto_reports_collision() {
        let opts = Options::new(1e-8, 1e-10);
        let r = integrate(|_, _| Ok(vec![c(1.0)]), 0.0, &[c(0.0)], 2.0, &opts, |_, y| y[0].re < 1.0);
        match r {
            Err(Error::CollisionEncountered { t }) => assert!((t - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_length() {
        let s = integrate(|_, y| Ok(y.to_vec()), 1.0, &[c(3.0)], 1.0, &Options::new(1e-8, 1e-8), |_, _| true).unwrap();
        assert_eq!(s.ts, vec![1.0]);
        assert_eq!(s.eval(1.0).unwrap()[0], c(3.0));
    }
}
