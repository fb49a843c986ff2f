//! Chebyshev–Gauss–Lobatto helpers on a single element `[a, b]`.

use std::f64::consts::PI;

/// Nodes `cos(πj/n)`, `j = 0..=n`, mapped to `[a, b]` (descending in t).
pub fn nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let x = (PI * j as f64 / n as f64).cos();
            a + (b - a) * (x + 1.0) / 2.0
        })
        .collect()
}

/// First-derivative matrix on the reference nodes, row-major, scaled to `[a, b]`.
pub fn diff_matrix(n: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let sgn = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    let scale = 2.0 / (b - a);
    let mut d = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        let mut diag = 0.0;
        for j in 0..=n {
            if i != j {
                let v = c(i) / c(j) * sgn(i + j) / (x[i] - x[j]);
                d[i][j] = v * scale;
                diag -= v;
            }
        }
        // negative-sum trick keeps rows exact on constants
        d[i][i] = diag * scale;
    }
    d
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..m {
                    out[i][j] += aik * bk[j];
                }
            }
        }
    }
    out
}

/// Coefficients `a_k` of `Σ a_k T_k` interpolating values at the nodes.
pub fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let mut a = vec![0.0; n + 1];
    for (k, ak) in a.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            s += w * v * (PI * (j * k) as f64 / n as f64).cos();
        }
        *ak = 2.0 * s / n as f64;
    }
    a[0] /= 2.0;
    a[n] /= 2.0;
    a
}

/// Clenshaw summation of `Σ a_k T_k(x)` at reference `x ∈ [-1, 1]`.
pub fn clenshaw(a: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ak in a.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ak;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + a[0]
}

/// Coefficients of d/dx of the series (reference variable).
pub fn derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut d = vec![0.0; n + 1];
    if n == 0 {
        return d;
    }
    d[n - 1] = 2.0 * n as f64 * a[n];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * a[k];
    }
    d[0] /= 2.0;
    d
}

/// Coefficients of an antiderivative (reference variable), constant term 0.
pub fn antiderivative(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let at = |k: usize| a.get(k).copied().unwrap_or(0.0);
    let mut out = vec![0.0; n + 2];
    out[1] = at(0) - at(2) / 2.0;
    for k in 2..=n + 1 {
        out[k] = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_polynomials_exactly() {
        let (a, b) = (-3.0, 2.0);
        let t = nodes(8, a, b);
        let d = diff_matrix(8, a, b);
        let f: Vec<f64> = t.iter().map(|t| t.powi(5) - 2.0 * t).collect();
        for i in 0..=8 {
            let df: f64 = (0..=8).map(|j| d[i][j] * f[j]).sum();
            assert!((df - (5.0 * t[i].powi(4) - 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn series_round_trip() {
        let t = nodes(10, -1.0, 1.0);
        let f: Vec<f64> = t.iter().map(|x| (2.0 * x).exp()).collect();
        let a = coefficients(&f);
        for x in [-0.9, 0.1, 0.77] {
            assert!((clenshaw(&a, x) - (2.0 * x).exp()).abs() < 1e-7);
            assert!((clenshaw(&derivative(&a), x) - 2.0 * (2.0 * x).exp()).abs() < 1e-5);
            let anti = antiderivative(&a);
            let integral = clenshaw(&anti, x) - clenshaw(&anti, -1.0);
            assert!((integral - ((2.0 * x).exp() - (-2.0f64).exp()) / 2.0).abs() < 1e-7);
        }
    }
}
