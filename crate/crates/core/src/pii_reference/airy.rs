use std::f64::consts::PI;

/// `Ai(0)`
const AI0: f64 = 0.355_028_053_887_817_24;
/// `-Ai'(0)`
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Below this |t| the Maclaurin series is used.
pub const SERIES_RADIUS: f64 = 5.0;

/// `(Ai(t), Ai'(t))`.
pub fn airy(t: f64) -> (f64, f64) {
    if t.abs() <= SERIES_RADIUS {
        airy_series(t)
    } else {
        airy_asymptotic(t)
    }
}

pub fn airy_ai(t: f64) -> f64 {
    airy(t).0
}

/// Maclaurin series `Ai = c₁ f - c₂ g`, summed until terms stop mattering.
pub fn airy_series(t: f64) -> (f64, f64) {
    let (t2, t3) = (t * t, t * t * t);
    // f = Σ a_k with a_{k+1} = a_k t³/((3k+2)(3k+3)), g = Σ b_k with
    // b_{k+1} = b_k t³/((3k+3)(3k+4)); the derivative terms follow from a_k, b_k
    let (mut a, mut b) = (1.0, t);
    let (mut f, mut g, mut fp, mut gp) = (1.0, t, 0.0, 1.0);
    for k in 0..200 {
        let kf = k as f64;
        let da = a * t2 / (3.0 * kf + 2.0);
        let db = b * t2 / (3.0 * kf + 3.0);
        a *= t3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        b *= t3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        f += a;
        g += b;
        fp += da;
        gp += db;
        if a.abs() + b.abs() + da.abs() + db.abs() < 1e-18 * (f.abs() + g.abs() + 1.0) {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Coefficients `u_k` of the Airy asymptotic series.
fn u_coeffs(n: usize) -> Vec<f64> {
    let mut u = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
    }
    u
}

/// Large-|t| expansions, truncated at the smallest term.
pub fn airy_asymptotic(t: f64) -> (f64, f64) {
    let z = t.abs();
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let u = u_coeffs(40);
    let v: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, uk)| if k == 0 { 1.0 } else { -(6.0 * k as f64 + 1.0) / (6.0 * k as f64 - 1.0) * uk })
        .collect();
    // number of terms: stop before the terms grow again
    let mut n = 1;
    while n < u.len() && u[n] / zeta.powi(n as i32) < u[n - 1] / zeta.powi(n as i32 - 1) {
        n += 1;
    }
    let sq_pi = PI.sqrt();
    if t > 0.0 {
        let (mut s_u, mut s_v) = (0.0, 0.0);
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let p = zeta.powi(k as i32);
            s_u += sign * u[k] / p;
            s_v += sign * v[k] / p;
        }
        let e = (-zeta).exp();
        (e / (2.0 * sq_pi * z.powf(0.25)) * s_u, -z.powf(0.25) * e / (2.0 * sq_pi) * s_v)
    } else {
        // even/odd split of the oscillatory expansion
        let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let p = zeta.powi(k as i32);
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                ue += sign * u[k] / p;
                ve += sign * v[k] / p;
            } else {
                uo += sign * u[k] / p;
                vo += sign * v[k] / p;
            }
        }
        let ph = zeta + PI / 4.0;
        let (s, c) = ph.sin_cos();
        ((s * ue - c * uo) / (sq_pi * z.powf(0.25)), -z.powf(0.25) / sq_pi * (c * ve + s * vo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_values() {
        // tabulated Airy values
        for (t, ai, aip) in [
            (0.0, 0.355028053887817239, -0.258819403792806798),
            (1.0, 0.135292416312881416, -0.159147441296793213),
            (-1.0, 0.535560883292352119, -0.010160567116645209),
            (4.0, 0.000951563851204801874, -0.00195864095020417890),
            (-4.0, -0.0702655329492895151, -0.790628575368581380),
            (6.0, 9.94769436025288957e-6, -2.47652003970349548e-5),
            (-6.0, -0.329145173629823105, 0.345935487281342895),
            (8.0, 4.69220761609923163e-8, -1.34143929790678657e-7),
            (10.0, 1.10475325528986859e-10, -3.52063367673892364e-10),
            (-10.0, 0.0402412384864431907, 0.996265044132790056),
        ] {
            let (a, ap) = airy(t);
            assert!(rel(a, ai) < 2e-10, "Ai({t}) = {a} vs {ai}");
            assert!(rel(ap, aip) < 2e-9, "Ai'({t}) = {ap} vs {aip}");
        }
    }

    #[test]
    fn series_and_asymptotics_overlap() {
        for t in [-6.0, -5.5, -5.0, 5.0, 5.5, 6.0] {
            let (a, ap) = airy_series(t);
            let (b, bp) = airy_asymptotic(t);
            let scale = if t > 0.0 { a.abs() } else { 0.5 };
            assert!((a - b).abs() < 1e-6 * scale, "{t}: {a} {b}");
            assert!((ap - bp).abs() < 1e-6 * scale.max(ap.abs()), "{t}: {ap} {bp}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        for t in [-7.0, -3.0, 0.5, 2.0, 4.5, 7.0] {
            let d2 = (airy(t + h).1 - airy(t - h).1) / (2.0 * h);
            let a = airy(t).0;
            assert!((d2 - t * a).abs() < 1e-6 * (1.0 + a.abs() * t.abs()), "{t}");
        }
    }

    #[test]
    fn wronskian_with_integral_identity() {
        // d/dt (Ai'² - t Ai²) = -Ai²
        let h = 1e-4;
        let w = |t: f64| {
            let (a, ap) = airy(t);
            ap * ap - t * a * a
        };
        for t in [-2.0, 1.0, 6.0] {
            let d = (w(t + h) - w(t - h)) / (2.0 * h);
            let a = airy(t).0;
            assert!((d + a * a).abs() < 1e-8, "{t}");
        }
    }
}
