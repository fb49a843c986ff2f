use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::governing::{GovSlice, GoverningPair, ScalarField};
use super::spec::FokkerPlanckSpec;
use super::sweep::{fd_values, reports, sweep, Sample};
use crate::error::{Error, Result};
use crate::fields::{Expr, Grid2D, Jet, ResidualReport, TabulatedField};

type C = Complex64;

/// Below this magnitude a divisor entry (`L₊`, or `b₊` in the `B₁` gauge)
/// counts as vanishing.
pub const GAUGE_FLOOR: f64 = 1e-14;

/// The eight Lax entries at one point, each with its partials.
///
/// `L = [[L₁, L₊], [L₋, L₂]]`, `B = [[B₁, B₊], [B₋, B₂]]`.
#[derive(Clone, Copy, Debug)]
pub struct LaxPoint {
    pub l1: Jet,
    pub l2: Jet,
    pub l_plus: Jet,
    pub l_minus: Jet,
    pub b1: Jet,
    pub b2: Jet,
    pub b_plus: Jet,
    pub b_minus: Jet,
}

/// Auxiliary combinations of the entries, as values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxDerived {
    pub l_minus: C,
    pub b_minus: C,
    pub x_t: C,
    pub y: C,
    pub x_1: C,
}

pub const ENTRY_NAMES: [&str; 8] = ["L1", "L2", "Lplus", "Lminus", "B1", "B2", "Bplus", "Bminus"];

impl LaxPoint {
    pub fn from_entries(e: [Jet; 8]) -> Self {
        let [l1, l2, l_plus, l_minus, b1, b2, b_plus, b_minus] = e;
        Self { l1, l2, l_plus, l_minus, b1, b2, b_plus, b_minus }
    }

    /// Entries in [`ENTRY_NAMES`] order.
    pub fn entries(&self) -> [Jet; 8] {
        [self.l1, self.l2, self.l_plus, self.l_minus, self.b1, self.b2, self.b_plus, self.b_minus]
    }

    pub fn lt(&self) -> Jet {
        self.l1 + self.l2
    }

    pub fn ld(&self) -> Jet {
        self.l1 - self.l2
    }

    pub fn bt(&self) -> Jet {
        self.b1 + self.b2
    }

    pub fn bd(&self) -> Jet {
        self.b1 - self.b2
    }

    pub fn l_matrix(&self) -> [[C; 2]; 2] {
        [[self.l1.v, self.l_plus.v], [self.l_minus.v, self.l2.v]]
    }

    pub fn b_matrix(&self) -> [[C; 2]; 2] {
        [[self.b1.v, self.b_plus.v], [self.b_minus.v, self.b2.v]]
    }

    /// `(b₊, b₁) = (B₊/L₊, b₊L₁ - B₁)` read back from the entries.
    pub fn governing(&self) -> (Jet, Jet) {
        let bp = self.b_plus / self.l_plus;
        (bp, bp * self.l1 - self.b1)
    }

    pub fn derived(&self) -> LaxDerived {
        let lp = self.l_plus.v;
        let l_minus = lp * self.l_minus.v;
        let x_t = self.lt().v + self.l_plus.x / lp;
        LaxDerived {
            l_minus,
            b_minus: self.b_minus.v * lp - self.b_plus.v * self.l_minus.v,
            x_t,
            y: self.l_plus.t / lp + self.bt().v,
            x_1: l_minus + self.l1.v * self.l1.v + self.l1.x - x_t * self.l1.v,
        }
    }

    /// Diagonal and off-diagonal constraints
    /// `κB₁ + σ(∂ₓL₁ + L₁² + L₊L₋) + vL₁ + α` and `κB₊ + σ(∂ₓL₊ + L_tL₊) + vL₊`.
    pub fn constraints(&self, spec: &FokkerPlanckSpec, t: f64, x: f64) -> Result<[C; 2]> {
        let c = spec.coefficients(t, x)?;
        let k = spec.kappa;
        let (s, v) = (c.sigma.v, c.v.v);
        let (l1, lp) = (self.l1, self.l_plus);
        Ok([
            self.b1.v * k + s * (l1.x + l1.v * l1.v + lp.v * self.l_minus.v) + v * l1.v + c.alpha.v,
            self.b_plus.v * k + s * (lp.x + self.lt().v * lp.v) + v * lp.v,
        ])
    }

    /// The four zero-curvature residuals (entries `11`, `+`, `-`, trace).
    pub fn zero_curvature(&self) -> [C; 4] {
        let (ld, bd) = (self.ld().v, self.bd().v);
        zero_curvature_values(
            [self.l1.t, self.l_plus.t, self.l_minus.t, self.lt().t],
            [self.b1.x, self.b_plus.x, self.b_minus.x, self.bt().x],
            self.l_plus.v,
            self.l_minus.v,
            self.b_plus.v,
            self.b_minus.v,
            ld,
            bd,
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn zero_curvature_values(lt: [C; 4], bx: [C; 4], lp: C, lm: C, bp: C, bm: C, ld: C, bd: C) -> [C; 4] {
    [
        lt[0] - bx[0] - bp * lm + bm * lp,
        lt[1] - bx[1] - bd * lp + bp * ld,
        lt[2] - bx[2] - bm * ld + bd * lm,
        lt[3] - bx[3],
    ]
}

/// A Lax pair frozen at one time.
pub trait LaxSlice {
    fn at(&self, x: f64) -> Result<LaxPoint>;
    /// Points in `x` to keep away from (poles of entries or of their
    /// rational reductions).
    fn poles(&self) -> Vec<C> {
        Vec::new()
    }
}

/// A Lax pair as a function of `(t, x)`.
pub trait LaxField: Send + Sync {
    fn slice(&self, t: f64) -> Result<Box<dyn LaxSlice + '_>>;

    fn at(&self, t: f64, x: f64) -> Result<LaxPoint> {
        self.slice(t)?.at(x)
    }
}

/// Lax pair with all eight entries given in closed form.
#[derive(Clone, Debug)]
pub struct ExprLax {
    pub entries: [Expr; 8],
}

impl ExprLax {
    /// Entries in [`ENTRY_NAMES`] order.
    pub fn parse(src: [&str; 8]) -> Result<Self> {
        let mut e = Vec::with_capacity(8);
        for s in src {
            e.push(Expr::parse(s)?);
        }
        Ok(Self { entries: e.try_into().expect("eight entries") })
    }

    pub fn zero() -> Self {
        Self::parse(["0"; 8]).expect("constant entries")
    }
}

struct ExprSlice<'a> {
    lax: &'a ExprLax,
    t: f64,
}

impl LaxSlice for ExprSlice<'_> {
    fn at(&self, x: f64) -> Result<LaxPoint> {
        Ok(LaxPoint::from_entries(std::array::from_fn(|k| self.lax.entries[k].jet(self.t, x))))
    }
}

impl LaxField for ExprLax {
    fn slice(&self, t: f64) -> Result<Box<dyn LaxSlice + '_>> {
        Ok(Box::new(ExprSlice { lax: self, t }))
    }
}

/// The second freely chosen entry of a restored pair.
#[derive(Clone)]
pub enum Gauge {
    L1(Arc<dyn ScalarField>),
    B1(Arc<dyn ScalarField>),
}

/// Lax pair rebuilt from the governing fields, a nonvanishing `L₊` and one
/// diagonal entry:
///
/// - `B₊ = b₊L₊`
/// - `L_t = -(κb₊ + v)/σ - ∂ₓL₊/L₊`
/// - `B_t = ∂ₓb₊ - b₊(κb₊ + v)/σ - 2b₁ - ∂_tL₊/L₊`
/// - `b₊L₁ - B₁ = b₁`
/// - `L₋ = ((κb₁ - α - (κb₊ + v)L₁)/σ - L₁² - ∂ₓL₁)/L₊`
/// - `B₋ = b₊L₋ + (∂ₓB₁ - ∂_tL₁)/L₊`
#[derive(Clone)]
pub struct RestoredLax {
    pub spec: FokkerPlanckSpec,
    pub governing: GoverningPair,
    pub l_plus: Arc<dyn ScalarField>,
    pub gauge: Gauge,
}

pub fn restore_lax(
    spec: &FokkerPlanckSpec,
    g: &GoverningPair,
    l_plus: Arc<dyn ScalarField>,
    gauge: Gauge,
) -> RestoredLax {
    RestoredLax { spec: spec.clone(), governing: g.clone(), l_plus, gauge }
}

struct RestoredSlice<'a> {
    lax: &'a RestoredLax,
    gov: GovSlice<'a>,
    t: f64,
}

impl LaxSlice for RestoredSlice<'_> {
    fn at(&self, x: f64) -> Result<LaxPoint> {
        let (t, lax) = (self.t, self.lax);
        let (bp, gb1) = self.gov.eval(x);
        let c = lax.spec.coefficients(t, x)?;
        let k = lax.spec.kappa;
        let lp = lax.l_plus.jet(t, x);
        if !(lp.v.norm() >= GAUGE_FLOOR) {
            return Err(Error::GaugeVanishes { t, x });
        }
        let drift = bp * k + c.v;
        let w = drift / c.sigma;
        let (l1, b1) = match &lax.gauge {
            Gauge::L1(f) => {
                let l1 = f.jet(t, x);
                (l1, bp * l1 - gb1)
            }
            Gauge::B1(f) => {
                if !(bp.v.norm() >= GAUGE_FLOOR) {
                    return Err(Error::GaugeVanishes { t, x });
                }
                let b1 = f.jet(t, x);
                ((b1 + gb1) / bp, b1)
            }
        };
        let lt = -w - lp.dx() / lp;
        let bt = bp.dx() - bp * w - gb1 * 2.0 - lp.dt() / lp;
        let l_minus = ((gb1 * k - c.alpha - drift * l1) / c.sigma - l1 * l1 - l1.dx()) / lp;
        let b_minus = bp * l_minus + (b1.dx() - l1.dt()) / lp;
        Ok(LaxPoint { l1, l2: lt - l1, l_plus: lp, l_minus, b1, b2: bt - b1, b_plus: bp * lp, b_minus })
    }

    fn poles(&self) -> Vec<C> {
        let mut p = self.gov.poles();
        p.extend(self.lax.l_plus.poles(self.t));
        p.extend(self.lax.l_plus.zeros(self.t));
        let gauge = match &self.lax.gauge {
            Gauge::L1(f) | Gauge::B1(f) => f,
        };
        p.extend(gauge.poles(self.t));
        p
    }
}

impl LaxField for RestoredLax {
    fn slice(&self, t: f64) -> Result<Box<dyn LaxSlice + '_>> {
        Ok(Box::new(RestoredSlice { lax: self, gov: self.governing.slice(t)?, t }))
    }
}

/// Evaluates `f` at every admissible grid point of a Lax field.
fn lax_sweep<const N: usize>(
    lax: &dyn LaxField,
    grid: &Grid2D,
    names: [&str; N],
    f: impl Fn(f64, f64, &LaxPoint) -> Result<[C; N]> + Sync,
) -> Result<[ResidualReport; N]> {
    sweep(grid, names, |t| {
        let slice = lax.slice(t)?;
        let poles = slice.poles();
        let f = &f;
        Ok(move |x: f64| -> Result<Sample<N>> {
            if !grid.admissible(x, &poles) {
                return Ok(None);
            }
            f(t, x, &slice.at(x)?).map(Some)
        })
    })
}

pub const CONSTRAINT_NAMES: [&str; 2] = ["constraint_diagonal", "constraint_offdiagonal"];
pub const ZERO_CURVATURE_NAMES: [&str; 4] =
    ["zero_curvature_11", "zero_curvature_plus", "zero_curvature_minus", "zero_curvature_trace"];

/// Residuals of the two constraints with analytic partials.
pub fn constraint_residuals(
    spec: &FokkerPlanckSpec,
    lax: &dyn LaxField,
    grid: &Grid2D,
) -> Result<(ResidualReport, ResidualReport)> {
    let [a, b] = lax_sweep(lax, grid, CONSTRAINT_NAMES, |t, x, p| p.constraints(spec, t, x))?;
    Ok((a, b))
}

/// How partial derivatives of the entries are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Samples all eight entries, masking excluded points with NaN.
pub fn tabulate_lax(lax: &dyn LaxField, grid: &Grid2D) -> Result<[TabulatedField; 8]> {
    let nan = C::new(f64::NAN, f64::NAN);
    let mut cols: [Vec<C>; 8] = std::array::from_fn(|_| Vec::with_capacity(grid.len()));
    for &t in grid.t_values() {
        let slice = lax.slice(t)?;
        let poles = slice.poles();
        for &x in grid.x_values() {
            if grid.admissible(x, &poles) {
                for (col, e) in cols.iter_mut().zip(slice.at(x)?.entries()) {
                    col.push(e.v);
                }
            } else {
                cols.iter_mut().for_each(|c| c.push(nan));
            }
        }
    }
    let mut out = Vec::with_capacity(8);
    for col in cols {
        out.push(TabulatedField::new(grid.clone(), col)?);
    }
    Ok(out.try_into().expect("eight entries"))
}

/// The four zero-curvature residuals, with either analytic partials or
/// fourth-order finite differences of the tabulated entries.
pub fn zero_curvature_residuals(
    lax: &dyn LaxField,
    grid: &Grid2D,
    mode: DerivativeMode,
) -> Result<[ResidualReport; 4]> {
    match mode {
        DerivativeMode::Analytic => lax_sweep(lax, grid, ZERO_CURVATURE_NAMES, |_, _, p| Ok(p.zero_curvature())),
        DerivativeMode::FiniteDifference => {
            let fields = tabulate_lax(lax, grid)?;
            let (values, skipped) = fd_values(&fields, |_, _, v, d| {
                let [l1, l2, lp, lm, b1, b2, bp, bm] = v;
                let [dl1, dl2, dlp, dlm, db1, db2, dbp, dbm] = d;
                Ok(zero_curvature_values(
                    [dl1.t, dlp.t, dlm.t, dl1.t + dl2.t],
                    [db1.x, dbp.x, dbm.x, db1.x + db2.x],
                    lp,
                    lm,
                    bp,
                    bm,
                    l1 - l2,
                    b1 - b2,
                ))
            })?;
            reports(ZERO_CURVATURE_NAMES, &values, skipped)
        }
    }
}

/// Compares `X₁` from its definition with `(κb₁ - α)/σ`, where `b₁` is read
/// back from the entries.
pub fn derived_consistency(spec: &FokkerPlanckSpec, lax: &dyn LaxField, grid: &Grid2D) -> Result<ResidualReport> {
    let [r] = lax_sweep(lax, grid, ["derived_x1"], |t, x, p| {
        let c = spec.coefficients(t, x)?;
        let (_, b1) = p.governing();
        Ok([p.derived().x_1 - (b1.v * spec.kappa - c.alpha.v) / c.sigma.v])
    })?;
    Ok(r)
}

/// `(κ∂_t + σ∂ₓₓ + v∂ₓ + α)F` by finite differences over the sampled grid.
pub fn fp_residual(spec: &FokkerPlanckSpec, f: &TabulatedField) -> Result<ResidualReport> {
    let (values, skipped) = fd_values(&[f.clone()], |t, x, [v], [d]| Ok([spec.apply(t, x, v, d.t, d.x, d.xx)?]))?;
    let [r] = reports(["fokker_planck"], &values, skipped)?;
    Ok(r)
}
