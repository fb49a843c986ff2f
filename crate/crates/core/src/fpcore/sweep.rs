//! Grid sweeps shared by the residual checks.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{fd_partials, has_stencil, residual_norms, Grid2D, Partials, ResidualReport, TabulatedField};

type C = Complex64;

/// One point's residuals, or `None` when the point is excluded.
pub(crate) type Sample<const N: usize> = Option<[C; N]>;

pub(crate) type Values<const N: usize> = Vec<((f64, f64), [C; N])>;

/// Splits pointwise residual tuples into one report per identity.
pub(crate) fn reports<const N: usize>(
    names: [&str; N],
    values: &Values<N>,
    skipped: usize,
) -> Result<[ResidualReport; N]> {
    if values.is_empty() {
        return Err(Error::EmptyResidualDomain { skipped });
    }
    let mut out = Vec::with_capacity(N);
    for (k, name) in names.iter().enumerate() {
        let col: Vec<_> = values.iter().map(|(p, r)| (*p, r[k])).collect();
        out.push(residual_norms(name, &col)?.with_skipped(skipped));
    }
    Ok(out.try_into().expect("N reports"))
}

/// Evaluates residuals row by row (rows in parallel). `row(t)` prepares a
/// per-time evaluator; results are assembled in grid order so the output is
/// independent of scheduling.
pub(crate) fn sweep_values<const N: usize, R, E>(grid: &Grid2D, row: R) -> Result<(Values<N>, usize)>
where
    R: Fn(f64) -> Result<E> + Sync,
    E: FnMut(f64) -> Result<Sample<N>>,
{
    let rows: Vec<Result<(Values<N>, usize)>> = grid
        .t_values()
        .par_iter()
        .map(|&t| {
            let mut eval = row(t)?;
            let mut vals = Vec::with_capacity(grid.nx());
            let mut skipped = 0;
            for &x in grid.x_values() {
                match eval(x)? {
                    Some(r) => vals.push(((t, x), r)),
                    None => skipped += 1,
                }
            }
            Ok((vals, skipped))
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for r in rows {
        let (v, s) = r?;
        values.extend(v);
        skipped += s;
    }
    Ok((values, skipped))
}

pub(crate) fn sweep<const N: usize, R, E>(grid: &Grid2D, names: [&str; N], row: R) -> Result<[ResidualReport; N]>
where
    R: Fn(f64) -> Result<E> + Sync,
    E: FnMut(f64) -> Result<Sample<N>>,
{
    let (values, skipped) = sweep_values(grid, row)?;
    reports(names, &values, skipped)
}

fn stencil_finite<const K: usize>(fields: &[TabulatedField; K], it: usize, ix: usize) -> bool {
    fields.iter().all(|f| {
        (0..5).all(|k| {
            let a = f.at(it + k - 2, ix);
            let b = f.at(it, ix + k - 2);
            a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()
        })
    })
}

/// Finite-difference residuals at every interior point whose stencils are
/// finite in all `fields` (which must share one grid). Returns the values
/// and the number of points without a usable stencil.
pub(crate) fn fd_values<const K: usize, const N: usize, F>(
    fields: &[TabulatedField; K],
    f: F,
) -> Result<(Values<N>, usize)>
where
    F: Fn(f64, f64, [C; K], [Partials; K]) -> Result<[C; N]> + Sync,
{
    let grid = &fields[0].grid;
    if fields.iter().any(|g| g.grid != *grid) {
        return Err(Error::InvalidInput("fields sampled on different grids".into()));
    }
    let rows: Vec<Result<(Values<N>, usize)>> = (0..grid.nt())
        .into_par_iter()
        .map(|it| {
            let mut vals = Vec::new();
            let mut skipped = 0;
            for ix in 0..grid.nx() {
                if !has_stencil(&fields[0], it, ix) || !stencil_finite(fields, it, ix) {
                    skipped += 1;
                    continue;
                }
                let mut d = [Partials { t: C::new(0.0, 0.0), x: C::new(0.0, 0.0), xx: C::new(0.0, 0.0) }; K];
                for (k, fld) in fields.iter().enumerate() {
                    d[k] = fd_partials(fld, it, ix)?;
                }
                let v: [C; K] = std::array::from_fn(|k| fields[k].at(it, ix));
                let (t, x) = grid.point(it, ix);
                vals.push(((t, x), f(t, x, v, d)?));
            }
            Ok((vals, skipped))
        })
        .collect();
    let mut values = Vec::new();
    let mut skipped = 0;
    for r in rows {
        let (v, s) = r?;
        values.extend(v);
        skipped += s;
    }
    Ok((values, skipped))
}
