use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{Grid2D, ResidualReport, TabulatedField};
use crate::fpcore::{LaxField, LaxSlice};
use crate::ode::{self, Options};

type C = Complex64;

/// Samples of the vector solution `(F, G)` of `∂_x Ψ = LΨ`, `∂_t Ψ = BΨ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvectorField {
    pub grid: Grid2D,
    pub f: Vec<C>,
    pub g: Vec<C>,
    pub base_point: (f64, f64),
    pub base_vector: [C; 2],
}

impl EigenvectorField {
    pub fn f_field(&self) -> TabulatedField {
        TabulatedField { grid: self.grid.clone(), values: self.f.clone() }
    }

    pub fn g_field(&self) -> TabulatedField {
        TabulatedField { grid: self.grid.clone(), values: self.g.clone() }
    }

    /// CSV `t,x,Re(F),Im(F),Re(G),Im(G)` in grid order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["t", "x", "Re(F)", "Im(F)", "Re(G)", "Im(G)"]).map_err(io)?;
        for (it, ix) in self.grid.indices() {
            let (t, x) = self.grid.point(it, ix);
            let k = self.grid.index(it, ix);
            let row = [t, x, self.f[k].re, self.f[k].im, self.g[k].re, self.g[k].im];
            w.write_record(row.map(|v| format!("{v:e}"))).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`EigenvectorField::write_csv`]; the base
    /// point is taken to be the first row.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut rows: Vec<[f64; 6]> = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            if rec.len() != 6 {
                return Err(Error::InvalidInput(format!("expected 6 columns, got {}", rec.len())));
            }
            let mut row = [0.0; 6];
            for (v, s) in row.iter_mut().zip(rec.iter()) {
                *v = s.trim().parse().map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))?;
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::InvalidInput("empty field table".into()));
        }
        let mut ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        ts.dedup();
        let nx = rows.len() / ts.len();
        let xs: Vec<f64> = rows[..nx].iter().map(|r| r[1]).collect();
        let grid = Grid2D::new(ts, xs, crate::fields::DEFAULT_EXCLUSION_RADIUS)?;
        if grid.len() != rows.len() {
            return Err(Error::InvalidInput("field table is not a full t-major grid".into()));
        }
        let f: Vec<C> = rows.iter().map(|r| C::new(r[2], r[3])).collect();
        let g: Vec<C> = rows.iter().map(|r| C::new(r[4], r[5])).collect();
        Ok(Self { base_point: (rows[0][0], rows[0][1]), base_vector: [f[0], g[0]], grid, f, g })
    }
}

fn mat_vec(m: [[C; 2]; 2], v: &[C]) -> Vec<C> {
    vec![m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn options(tol: f64, base: [C; 2]) -> Options {
    let scale = base[0].norm().max(base[1].norm()).max(f64::MIN_POSITIVE);
    Options::new(tol, tol * 1e-3 * scale)
}

/// `Ψ` transported in `x` at fixed `t` through the sorted `targets`,
/// starting from `(x0, v0)`; node-to-node restarts keep every output at
/// full step accuracy.
fn transport_x(
    slice: &dyn LaxSlice,
    t: f64,
    x0: f64,
    v0: [C; 2],
    targets: &[f64],
    opts: &Options,
) -> Result<Vec<[C; 2]>> {
    let mut out = Vec::with_capacity(targets.len());
    let (mut x, mut v) = (x0, v0.to_vec());
    for &xe in targets {
        if xe != x {
            let sol = ode::integrate(|x, y| Ok(mat_vec(slice.at(x)?.l_matrix(), y)), x, &v, xe, opts, |_, _| true)
                .map_err(|e| underflow(e, |s| (t, s)))?;
            v = sol.last().1.clone();
            x = xe;
        }
        out.push([v[0], v[1]]);
    }
    Ok(out)
}

/// As [`transport_x`], in `t` at fixed `x` with the `B` matrix.
fn transport_t(
    lax: &dyn LaxField,
    x: f64,
    t0: f64,
    v0: [C; 2],
    targets: &[f64],
    opts: &Options,
) -> Result<Vec<[C; 2]>> {
    let mut out = Vec::with_capacity(targets.len());
    let (mut t, mut v) = (t0, v0.to_vec());
    for &te in targets {
        if te != t {
            let sol = ode::integrate(|t, y| Ok(mat_vec(lax.at(t, x)?.b_matrix(), y)), t, &v, te, opts, |_, _| true)
                .map_err(|e| underflow(e, |s| (s, x)))?;
            v = sol.last().1.clone();
            t = te;
        }
        out.push([v[0], v[1]]);
    }
    Ok(out)
}

fn underflow(e: Error, at: impl Fn(f64) -> (f64, f64)) -> Error {
    match e {
        Error::StepUnderflow { t } | Error::CollisionEncountered { t } => {
            let (t, x) = at(t);
            Error::TransportUnderflow { t, x }
        }
        other => other,
    }
}

/// Transports outward from `from` through the axis values on either side,
/// returning values in axis order.
fn fan_out(
    axis: &[f64],
    from: usize,
    v0: [C; 2],
    mut run: impl FnMut(f64, [C; 2], &[f64]) -> Result<Vec<[C; 2]>>,
) -> Result<Vec<[C; 2]>> {
    let up = run(axis[from], v0, &axis[from..])?;
    let down_targets: Vec<f64> = axis[..from].iter().rev().copied().collect();
    let down = run(axis[from], v0, &down_targets)?;
    let mut out: Vec<[C; 2]> = down.into_iter().rev().collect();
    out.extend(up);
    Ok(out)
}

fn node_index(axis: &[f64], v: f64, what: &str) -> Result<usize> {
    let scale = 1.0 + v.abs();
    axis.iter()
        .position(|a| (a - v).abs() <= 1e-12 * scale)
        .ok_or_else(|| Error::InvalidInput(format!("base {what} = {v} is not a grid node")))
}

fn check_poles(lax: &dyn LaxField, grid: &Grid2D) -> Result<()> {
    for &t in grid.t_values() {
        let poles = lax.slice(t)?.poles();
        if let Some(&x) = grid.x_values().iter().find(|x| !grid.admissible(**x, &poles)) {
            return Err(Error::InvalidInput(format!(
                "grid point (t={t}, x={x}) lies within {} of a pole",
                grid.exclusion_radius()
            )));
        }
    }
    Ok(())
}

/// Propagates `base_vector` from `base_point` over the grid: along the base
/// row in `x`, then along every column in `t` (columns in parallel), with
/// adaptive steps between nodes at local tolerance `tol`.
pub fn propagate(
    lax: &dyn LaxField,
    grid: &Grid2D,
    base_point: (f64, f64),
    base_vector: [C; 2],
    tol: f64,
) -> Result<EigenvectorField> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let it0 = node_index(grid.t_values(), base_point.0, "t")?;
    let ix0 = node_index(grid.x_values(), base_point.1, "x")?;
    check_poles(lax, grid)?;
    let opts = options(tol, base_vector);
    let t0 = grid.t_values()[it0];
    let slice = lax.slice(t0)?;
    let row = fan_out(grid.x_values(), ix0, base_vector, |x, v, targets| {
        transport_x(slice.as_ref(), t0, x, v, targets, &opts)
    })?;
    let columns: Vec<Result<Vec<[C; 2]>>> = grid
        .x_values()
        .par_iter()
        .zip(row.par_iter())
        .map(|(&x, &v)| fan_out(grid.t_values(), it0, v, |t, v, targets| transport_t(lax, x, t, v, targets, &opts)))
        .collect();
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    let (mut f, mut g) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for it in 0..grid.nt() {
        for col in &columns {
            f.push(col[it][0]);
            g.push(col[it][1]);
        }
    }
    Ok(EigenvectorField { grid: grid.clone(), f, g, base_point: (t0, grid.x_values()[ix0]), base_vector })
}

/// Transports the base vector to the grid corner opposite the base point
/// along the two extreme lattice paths (x then t, t then x) and reports
/// their relative mismatch.
pub fn path_independence_residual(
    lax: &dyn LaxField,
    grid: &Grid2D,
    base_point: (f64, f64),
    base_vector: [C; 2],
    tol: f64,
) -> Result<ResidualReport> {
    let it0 = node_index(grid.t_values(), base_point.0, "t")?;
    let ix0 = node_index(grid.x_values(), base_point.1, "x")?;
    check_poles(lax, grid)?;
    let opts = options(tol, base_vector);
    let (ts, xs) = (grid.t_values(), grid.x_values());
    let far = |axis: &[f64], i: usize| if i == 0 { axis.len() - 1 } else { 0 };
    let (it1, ix1) = (far(ts, it0), far(xs, ix0));
    let (t0, x0, t1, x1) = (ts[it0], xs[ix0], ts[it1], xs[ix1]);
    // through every lattice node on the way, as propagate does
    let path = |axis: &[f64], a: usize, b: usize| -> Vec<f64> {
        if a <= b {
            axis[a..=b].to_vec()
        } else {
            axis[b..=a].iter().rev().copied().collect()
        }
    };
    let (x_path, t_path) = (path(xs, ix0, ix1), path(ts, it0, it1));
    let s0 = lax.slice(t0)?;
    let v_row = *transport_x(s0.as_ref(), t0, x0, base_vector, &x_path, &opts)?.last().unwrap();
    let a = *transport_t(lax, x1, t0, v_row, &t_path, &opts)?.last().unwrap();
    let v_col = *transport_t(lax, x0, t0, base_vector, &t_path, &opts)?.last().unwrap();
    let s1 = lax.slice(t1)?;
    let b = *transport_x(s1.as_ref(), t1, x0, v_col, &x_path, &opts)?.last().unwrap();
    let diff = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
    let scale = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt().max((b[0].norm_sqr() + b[1].norm_sqr()).sqrt());
    let mismatch = if scale > 0.0 { diff / scale } else { diff };
    Ok(ResidualReport {
        identity_name: "path_independence".into(),
        max_abs: mismatch,
        rms: mismatch,
        worst_point: (t1, x1),
        samples: 1,
        skipped: 0,
    })
}
