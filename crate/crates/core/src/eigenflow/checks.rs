use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transport::{path_independence_residual, propagate, EigenvectorField};
use crate::error::Result;
use crate::fields::{richardson_confirms, richardson_confirms_above, Grid2D, ResidualReport, TabulatedField};
use crate::fpcore::sweep::{fd_values, reports};
use crate::fpcore::{fp_residual, ode_in_x_coefficients, FokkerPlanckSpec, GoverningPair, LaxField};

type C = Complex64;

/// The Fokker–Planck residual of the first component, scaled by `max|F|`.
pub fn fp_check(spec: &FokkerPlanckSpec, field: &EigenvectorField) -> Result<ResidualReport> {
    fp_residual(spec, &field.f_field().normalized())
}

fn excluded(g: &GoverningPair, grid: &Grid2D, t: f64, x: f64) -> Result<bool> {
    Ok(!grid.admissible(x, &g.poles(t)?))
}

/// `∂_tF - b₊∂_xF + b₁F` by finite differences of the scaled `F`, with
/// `(b₊, b₁)` evaluated in closed form; points near poles are skipped.
pub fn first_order_check(g: &GoverningPair, field: &EigenvectorField) -> Result<ResidualReport> {
    let f = field.f_field().normalized();
    let grid = f.grid.clone();
    let (values, skipped) = fd_values(&[f], |t, x, [v], [d]| {
        if excluded(g, &grid, t, x)? {
            return Ok([C::new(f64::NAN, 0.0)]);
        }
        let (bp, b1) = g.eval(t, x)?;
        Ok([d.t - bp.v * d.x + b1.v * v])
    })?;
    finish("first_order_pde", values, skipped)
}

/// `σF'' + (v + κb₊)F' + (α - κb₁)F` along each row, by finite differences
/// of the scaled `F`.
pub fn ode_in_x_check(spec: &FokkerPlanckSpec, g: &GoverningPair, field: &EigenvectorField) -> Result<ResidualReport> {
    let f = field.f_field().normalized();
    let grid = f.grid.clone();
    let (values, skipped) = fd_values(&[f], |t, x, [v], [d]| {
        if excluded(g, &grid, t, x)? {
            return Ok([C::new(f64::NAN, 0.0)]);
        }
        let [a, b, c] = ode_in_x_coefficients(spec, g, t)?.at(x)?;
        Ok([a * d.xx + b * d.x + c * v])
    })?;
    finish("ode_in_x", values, skipped)
}

/// Drops the NaN markers of excluded points before summarizing.
fn finish(name: &str, values: Vec<((f64, f64), [C; 1])>, skipped: usize) -> Result<ResidualReport> {
    let before = values.len();
    let kept: Vec<_> = values.into_iter().filter(|(_, [r])| !r.re.is_nan()).collect();
    let skipped = skipped + before - kept.len();
    let [r] = reports([name], &kept, skipped)?;
    Ok(r)
}

/// A finite-difference residual on a grid and on its refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCheck {
    pub coarse: ResidualReport,
    pub fine: ResidualReport,
    /// The residual dropped ≥ 8× under step halving, or sits at roundoff.
    pub confirmed: bool,
}

impl RichardsonCheck {
    pub fn new(coarse: ResidualReport, fine: ResidualReport) -> Self {
        let confirmed = richardson_confirms(coarse.max_abs, fine.max_abs);
        Self { coarse, fine, confirmed }
    }

    /// As [`RichardsonCheck::new`] with a raised noise floor.
    pub fn with_floor(coarse: ResidualReport, fine: ResidualReport, floor: f64) -> Self {
        let confirmed = richardson_confirms_above(coarse.max_abs, fine.max_abs, floor);
        Self { coarse, fine, confirmed }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.confirmed && self.fine.passes(tol)
    }
}

/// Everything verified about a propagated eigenvector field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenflowChecks {
    pub path_independence: ResidualReport,
    pub fokker_planck: RichardsonCheck,
    pub first_order: Option<RichardsonCheck>,
    pub ode_in_x: Option<RichardsonCheck>,
}

impl EigenflowChecks {
    pub fn passes(&self, path_tol: f64, fd_tol: f64) -> bool {
        self.path_independence.passes(path_tol)
            && self.fokker_planck.passes(fd_tol)
            && self.first_order.as_ref().is_none_or(|c| c.passes(fd_tol))
            && self.ode_in_x.as_ref().is_none_or(|c| c.passes(fd_tol))
    }
}

/// Propagates on `grid` and on its refinement and runs every check; the
/// governing-field checks need the pair `(b₊, b₁)` of the same Lax pair.
pub fn eigenflow_checks(
    spec: &FokkerPlanckSpec,
    lax: &dyn LaxField,
    governing: Option<&GoverningPair>,
    grid: &Grid2D,
    base_vector: [C; 2],
    tol: f64,
) -> Result<(EigenvectorField, EigenflowChecks)> {
    let base = (grid.t_values()[0], grid.x_values()[0]);
    let fine_grid = grid.refined()?;
    let coarse = propagate(lax, grid, base, base_vector, tol)?;
    let fine = propagate(lax, &fine_grid, base, base_vector, tol)?;
    let both = |check: &dyn Fn(&EigenvectorField) -> Result<ResidualReport>| -> Result<RichardsonCheck> {
        Ok(RichardsonCheck::new(check(&coarse)?, check(&fine)?))
    };
    let fokker_planck = both(&|f| fp_check(spec, f))?;
    let (first_order, ode_in_x) = match governing {
        Some(g) => (Some(both(&|f| first_order_check(g, f))?), Some(both(&|f| ode_in_x_check(spec, g, f))?)),
        None => (None, None),
    };
    let path_independence = path_independence_residual(lax, grid, base, base_vector, tol)?;
    Ok((coarse, EigenflowChecks { path_independence, fokker_planck, first_order, ode_in_x }))
}

/// `F` sampled from a closed form, for checks against exact solutions.
pub fn field_from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> C) -> EigenvectorField {
    let t = TabulatedField::sample(grid, f);
    EigenvectorField {
        base_point: (grid.t_values()[0], grid.x_values()[0]),
        base_vector: [t.values[0], C::new(0.0, 0.0)],
        g: vec![C::new(0.0, 0.0); grid.len()],
        f: t.values,
        grid: grid.clone(),
    }
}
