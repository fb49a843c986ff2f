//! Fourth-order central finite differences.

use num_complex::Complex64;

use super::grid::TabulatedField;
use crate::error::{Error, Result};

/// Partial-derivative estimates at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub t: Complex64,
    pub x: Complex64,
    pub xx: Complex64,
}

/// `f'` from samples `[f(-2h), f(-h), f(0), f(h), f(2h)]`.
pub fn d1(f: [Complex64; 5], h: f64) -> Complex64 {
    (-f[4] + f[3] * 8.0 - f[1] * 8.0 + f[0]) / (12.0 * h)
}

/// `f''` from the same five samples.
pub fn d2(f: [Complex64; 5], h: f64) -> Complex64 {
    (-f[4] + f[3] * 16.0 - f[2] * 30.0 + f[1] * 16.0 - f[0]) / (12.0 * h * h)
}

fn uniform_step(axis: &[f64], i: usize) -> Option<f64> {
    let h = axis[i + 1] - axis[i];
    let ok = (i - 2..i + 2).all(|j| ((axis[j + 1] - axis[j]) - h).abs() <= 1e-9 * h.abs());
    ok.then_some(h)
}

/// Whether `(it, ix)` has two neighbours on each side in both directions.
pub fn has_stencil(field: &TabulatedField, it: usize, ix: usize) -> bool {
    let g = &field.grid;
    it >= 2 && ix >= 2 && it + 2 < g.nt() && ix + 2 < g.nx()
}

/// `∂_t`, `∂_x`, `∂_xx` at an interior point of a uniform grid.
pub fn fd_partials(field: &TabulatedField, it: usize, ix: usize) -> Result<Partials> {
    if !has_stencil(field, it, ix) {
        return Err(Error::StencilOutOfRange { it, ix });
    }
    let g = &field.grid;
    let ht = uniform_step(g.t_values(), it).ok_or(Error::NonUniformStencil { it, ix })?;
    let hx = uniform_step(g.x_values(), ix).ok_or(Error::NonUniformStencil { it, ix })?;
    let col: [Complex64; 5] = std::array::from_fn(|k| field.at(it + k - 2, ix));
    let row: [Complex64; 5] = std::array::from_fn(|k| field.at(it, ix + k - 2));
    Ok(Partials { t: d1(col, ht), x: d1(row, hx), xx: d2(row, hx) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2D;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn linear_field_in_x() {
        let g = Grid2D::uniform((0.0, 1.0, 7), (-1.0, 2.0, 9), 0.05).unwrap();
        let f = TabulatedField::sample(&g, |_, x| c(x));
        let p = fd_partials(&f, 3, 4).unwrap();
        assert!((p.x - 1.0).norm() < 1e-12);
        assert!(p.xx.norm() < 1e-10);
        assert!(p.t.norm() < 1e-12);
    }

    #[test]
    fn quadratic_in_t_is_exact() {
        let g = Grid2D::uniform((0.0, 1.0, 11), (0.0, 1.0, 5), 0.05).unwrap();
        let f = TabulatedField::sample(&g, |t, _| c(t * t));
        for it in 2..9 {
            let t = g.t_values()[it];
            assert!((fd_partials(&f, it, 2).unwrap().t - 2.0 * t).norm() < 1e-12);
        }
    }

    #[test]
    fn sine_second_derivative() {
        let g = Grid2D::uniform((0.0, 0.04, 5), (0.0, 2.0, 201), 0.05).unwrap();
        let f = TabulatedField::sample(&g, |_, x| c(x.sin()));
        for ix in [2, 50, 120, 198] {
            let x = g.x_values()[ix];
            let p = fd_partials(&f, 2, ix).unwrap();
            assert!((p.xx + x.sin()).norm() < 1e-8);
        }
    }

    #[test]
    fn quartic_exact() {
        let g = Grid2D::uniform((0.0, 1.0, 5), (-1.0, 1.0, 21), 0.05).unwrap();
        let f = TabulatedField::sample(&g, |_, x| c(x.powi(4) - 2.0 * x.powi(3) + x));
        for ix in 2..19 {
            let x = g.x_values()[ix];
            let p = fd_partials(&f, 2, ix).unwrap();
            let fx = 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
            let fxx = 12.0 * x * x - 12.0 * x;
            assert!((p.x - fx).norm() <= 1e-9 * (1.0 + fx.abs()));
            assert!((p.xx - fxx).norm() <= 1e-9 * (1.0 + fxx.abs()));
        }
    }

    #[test]
    fn edge_points_rejected() {
        let g = Grid2D::uniform((0.0, 1.0, 5), (0.0, 1.0, 5), 0.05).unwrap();
        let f = TabulatedField::sample(&g, |_, x| c(x));
        assert_eq!(fd_partials(&f, 1, 2), Err(Error::StencilOutOfRange { it: 1, ix: 2 }));
        assert!(fd_partials(&f, 2, 2).is_ok());
    }

    #[test]
    fn nonuniform_rejected() {
        let g = Grid2D::new(vec![0.0, 0.1, 0.2, 0.3, 0.4], vec![0.0, 0.1, 0.25, 0.3, 0.4], 0.05).unwrap();
        let f = TabulatedField::sample(&g, |_, x| c(x));
        assert!(matches!(fd_partials(&f, 2, 2), Err(Error::NonUniformStencil { .. })));
    }
}
