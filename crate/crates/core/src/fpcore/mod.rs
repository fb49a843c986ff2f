//! Generic Fokker–Planck layer: coefficient specs, the governing system for
//! `(b₊, b₁)`, restoration of a full Lax pair, and residuals of the
//! constraints, zero-curvature equations and the FP operator itself.

mod governing;
mod lax;
mod spec;
pub(crate) mod sweep;

pub use governing::{
    governing_point, governing_residuals, governing_residuals_tabulated, ode_in_x_coefficients, tabulate_governing,
    FnField, GenericFields, GovSlice, GoverningPair, OdeInX, ScalarField, GOVERNING_NAMES,
};
pub use lax::{
    constraint_residuals, derived_consistency, fp_residual, restore_lax, tabulate_lax, zero_curvature_residuals,
    DerivativeMode, ExprLax, Gauge, LaxDerived, LaxField, LaxPoint, LaxSlice, RestoredLax, CONSTRAINT_NAMES,
    ENTRY_NAMES, GAUGE_FLOOR, ZERO_CURVATURE_NAMES,
};
pub use spec::{Coefficients, FokkerPlanckSpec};
