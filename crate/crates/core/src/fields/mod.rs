//! Numeric substrate: polynomials in `x`, jets, sampling grids, finite
//! differences, residual summaries and closed-form expressions.

mod expr;
mod fd;
mod grid;
mod jet;
mod polynomial;
mod residual;
mod scalar;

pub use expr::{Expr, Func};
pub use fd::{d1, d2, fd_partials, has_stencil, Partials};
pub use grid::{Grid2D, TabulatedField, DEFAULT_EXCLUSION_RADIUS};
pub use jet::Jet;
#[allow(unused_imports)]
pub(crate) use jet::{finite, NAN};
pub use polynomial::{Pair, Polynomial, TRIM_TOLERANCE};
pub use residual::{
    residual_norms, richardson_confirms, richardson_confirms_above, ResidualReport, RICHARDSON_FACTOR, RICHARDSON_FLOOR,
};
pub use scalar::{Dual, Scalar};
