use std::sync::Arc;

use num_complex::Complex64;

use super::spec::FokkerPlanckSpec;
use super::sweep::{fd_values, reports, sweep, Sample};
use crate::calogero::{PoleFields, PoleSlice};
use crate::error::{Error, Result};
use crate::fields::{Expr, Grid2D, Jet, ResidualReport, TabulatedField};

type C = Complex64;

/// A scalar field of `(t, x)` with exact second-order partials.
pub trait ScalarField: Send + Sync {
    fn jet(&self, t: f64, x: f64) -> Jet;
    /// Singular points in `x` at time `t` (empty for entire fields).
    fn poles(&self, _t: f64) -> Vec<C> {
        Vec::new()
    }
    /// Known zeros in `x` at time `t`; only needed when the field is used as
    /// a divisor.
    fn zeros(&self, _t: f64) -> Vec<C> {
        Vec::new()
    }
}

impl ScalarField for Expr {
    fn jet(&self, t: f64, x: f64) -> Jet {
        Expr::jet(self, t, x)
    }
}

/// Adapter for closures producing jets.
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> Jet + Send + Sync> ScalarField for FnField<F> {
    fn jet(&self, t: f64, x: f64) -> Jet {
        (self.0)(t, x)
    }
}

/// `b₊` and `b₁` as arbitrary closed-form fields.
#[derive(Clone)]
pub struct GenericFields {
    pub b_plus: Arc<dyn ScalarField>,
    pub b_one: Arc<dyn ScalarField>,
}

impl GenericFields {
    pub fn new(b_plus: Arc<dyn ScalarField>, b_one: Arc<dyn ScalarField>) -> Self {
        Self { b_plus, b_one }
    }

    pub fn from_exprs(b_plus: &str, b_one: &str) -> Result<Self> {
        Ok(Self::new(Arc::new(Expr::parse(b_plus)?), Arc::new(Expr::parse(b_one)?)))
    }
}

/// The governing fields `(b₊, b₁)`, either generic or in rational pole form
/// driven by a particle state.
#[derive(Clone)]
pub enum GoverningPair {
    Generic(GenericFields),
    Pole(PoleFields),
}

/// A governing pair frozen at one time.
pub enum GovSlice<'a> {
    Generic { fields: &'a GenericFields, t: f64 },
    Pole(PoleSlice),
}

impl GovSlice<'_> {
    /// `(b₊, b₁)` jets at `x`.
    pub fn eval(&self, x: f64) -> (Jet, Jet) {
        match self {
            GovSlice::Generic { fields, t } => (fields.b_plus.jet(*t, x), fields.b_one.jet(*t, x)),
            GovSlice::Pole(p) => p.eval(x),
        }
    }

    pub fn poles(&self) -> Vec<C> {
        match self {
            GovSlice::Generic { fields, t } => {
                let mut v = fields.b_plus.poles(*t);
                v.extend(fields.b_one.poles(*t));
                v
            }
            GovSlice::Pole(p) => p.poles(),
        }
    }
}

impl GoverningPair {
    pub fn slice(&self, t: f64) -> Result<GovSlice<'_>> {
        Ok(match self {
            GoverningPair::Generic(fields) => GovSlice::Generic { fields, t },
            GoverningPair::Pole(p) => GovSlice::Pole(p.slice(t)?),
        })
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<(Jet, Jet)> {
        Ok(self.slice(t)?.eval(x))
    }

    pub fn poles(&self, t: f64) -> Result<Vec<C>> {
        Ok(self.slice(t)?.poles())
    }
}

/// Pointwise residuals of the conservation law and the second governing
/// equation, from jets of `b₊`, `b₁` and the spec coefficients.
pub fn governing_point(spec: &FokkerPlanckSpec, t: f64, x: f64, bp: Jet, b1: Jet) -> Result<[C; 2]> {
    let c = spec.coefficients(t, x)?;
    let k = spec.kappa;
    let w = (bp * k + c.v) / c.sigma;
    let z = (b1 * k - c.alpha) / c.sigma;
    let conservation = w.t + bp.xx - (bp * w).x - b1.x * 2.0;
    let second = z.t + b1.xx - bp.v * z.x + w.v * b1.x - z.v * bp.x * 2.0;
    Ok([conservation, second])
}

pub const GOVERNING_NAMES: [&str; 2] = ["conservation_law", "second_governing"];

/// Residuals of the two governing equations over the grid with analytic
/// partials; points within the exclusion radius of a pole are skipped.
pub fn governing_residuals(
    spec: &FokkerPlanckSpec,
    g: &GoverningPair,
    grid: &Grid2D,
) -> Result<(ResidualReport, ResidualReport)> {
    let [a, b] = sweep(grid, GOVERNING_NAMES, |t| {
        let slice = g.slice(t)?;
        let poles = slice.poles();
        Ok(move |x: f64| -> Result<Sample<2>> {
            if !grid.admissible(x, &poles) {
                return Ok(None);
            }
            let (bp, b1) = slice.eval(x);
            governing_point(spec, t, x, bp, b1).map(Some)
        })
    })?;
    Ok((a, b))
}

/// Governing residuals from tabulated `b₊`, `b₁` with finite-difference
/// partials. Non-finite samples (e.g. masked poles) disqualify every
/// stencil that touches them.
pub fn governing_residuals_tabulated(
    spec: &FokkerPlanckSpec,
    b_plus: &TabulatedField,
    b_one: &TabulatedField,
) -> Result<(ResidualReport, ResidualReport)> {
    let (values, skipped) = governing_values_tabulated(spec, b_plus, b_one)?;
    let [a, b] = reports(GOVERNING_NAMES, &values, skipped)?;
    Ok((a, b))
}

pub(crate) fn governing_values_tabulated(
    spec: &FokkerPlanckSpec,
    b_plus: &TabulatedField,
    b_one: &TabulatedField,
) -> Result<(Vec<((f64, f64), [C; 2])>, usize)> {
    let grid = &b_plus.grid;
    if b_one.grid != *grid {
        return Err(Error::InvalidInput("b_plus and b_one sampled on different grids".into()));
    }
    let k = spec.kappa;
    // auxiliary tabulations: W, Z and b₊W
    let mut w = Vec::with_capacity(grid.len());
    let mut z = Vec::with_capacity(grid.len());
    let mut bw = Vec::with_capacity(grid.len());
    for (i, j) in grid.indices() {
        let (t, x) = grid.point(i, j);
        let c = spec.coefficients(t, x)?;
        let (bp, b1) = (b_plus.at(i, j), b_one.at(i, j));
        let wv = (bp * k + c.v.v) / c.sigma.v;
        w.push(wv);
        z.push((b1 * k - c.alpha.v) / c.sigma.v);
        bw.push(bp * wv);
    }
    let tab = |v: Vec<C>| TabulatedField::new(grid.clone(), v);
    let fields = [b_plus.clone(), b_one.clone(), tab(w)?, tab(z)?, tab(bw)?];
    fd_values(&fields, |_, _, vals, d| {
        let [bp, _, wv, zv, _] = vals;
        let [dbp, db1, dw, dz, dbw] = d;
        Ok([dw.t + dbp.xx - dbw.x - db1.x * 2.0, dz.t + db1.xx - bp * dz.x + wv * db1.x - zv * dbp.x * 2.0])
    })
}

/// Samples a governing pair on a grid, masking excluded points with NaN.
pub fn tabulate_governing(g: &GoverningPair, grid: &Grid2D) -> Result<(TabulatedField, TabulatedField)> {
    let nan = C::new(f64::NAN, f64::NAN);
    let mut bp = Vec::with_capacity(grid.len());
    let mut b1 = Vec::with_capacity(grid.len());
    for &t in grid.t_values() {
        let s = g.slice(t)?;
        let poles = s.poles();
        for &x in grid.x_values() {
            if grid.admissible(x, &poles) {
                let (a, b) = s.eval(x);
                bp.push(a.v);
                b1.push(b.v);
            } else {
                bp.push(nan);
                b1.push(nan);
            }
        }
    }
    Ok((TabulatedField::new(grid.clone(), bp)?, TabulatedField::new(grid.clone(), b1)?))
}

/// Coefficients `(σ, v + κb₊, α - κb₁)` of the second-order ODE in `x`
/// satisfied by the first eigenvector component at fixed `t`.
pub struct OdeInX<'a> {
    spec: &'a FokkerPlanckSpec,
    slice: GovSlice<'a>,
    t: f64,
}

impl OdeInX<'_> {
    pub fn at(&self, x: f64) -> Result<[C; 3]> {
        let c = self.spec.coefficients(self.t, x)?;
        let (bp, b1) = self.slice.eval(x);
        let k = self.spec.kappa;
        Ok([c.sigma.v, c.v.v + bp.v * k, c.alpha.v - b1.v * k])
    }

    pub fn poles(&self) -> Vec<C> {
        self.slice.poles()
    }
}

pub fn ode_in_x_coefficients<'a>(spec: &'a FokkerPlanckSpec, g: &'a GoverningPair, t: f64) -> Result<OdeInX<'a>> {
    Ok(OdeInX { spec, slice: g.slice(t)?, t })
}
