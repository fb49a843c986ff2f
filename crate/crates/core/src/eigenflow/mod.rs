//! Transport of the linear system `∂_x Ψ = LΨ`, `∂_t Ψ = BΨ` over a
//! rectangle, and checks that the first component solves the
//! Fokker–Planck equation and the reductions leading to it.

mod checks;
mod transport;

pub use checks::{
    eigenflow_checks, field_from_fn, first_order_check, fp_check, ode_in_x_check, EigenflowChecks, RichardsonCheck,
};
pub use transport::{path_independence_residual, propagate, EigenvectorField};

use num_complex::Complex64;

use crate::calogero::StateSource;
use crate::error::Result;

/// Default base vector `(1, 0)`.
pub const DEFAULT_BASE_VECTOR: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

fn sample_times(t0: f64, t1: f64, samples: usize) -> impl Iterator<Item = f64> {
    let n = samples.max(2);
    (0..n).map(move |i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
}

/// Left edge of an x-window of the given width whose segment keeps at
/// least `margin` from every pole `Q_k(t)`, `t ∈ [t0, t1]` (sampled).
///
/// The window centred at the origin is preferred, since the Lax entries
/// grow like `x²` and finite differences lose accuracy far out; otherwise
/// the window starts `margin` to the right of the rightmost nearly real pole.
pub fn choose_x_window(
    src: &dyn StateSource,
    t0: f64,
    t1: f64,
    width: f64,
    margin: f64,
    samples: usize,
) -> Result<f64> {
    let mut poles = Vec::new();
    for t in sample_times(t0, t1, samples) {
        poles.extend(src.state_at(t)?.q);
    }
    let clear = |a: f64| {
        poles.iter().all(|q| {
            let nearest = q.re.clamp(a, a + width);
            Complex64::new(nearest - q.re, -q.im).norm() > margin
        })
    };
    let centred = -width / 2.0;
    if clear(centred) {
        return Ok(centred);
    }
    let right = poles.iter().filter(|q| q.im.abs() <= margin).map(|q| q.re + margin).fold(f64::NEG_INFINITY, f64::max);
    Ok(right)
}
