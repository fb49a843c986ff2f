use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default minimum distance between a sample point and any pole.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.05;

/// Rectangular sampling lattice in `(t, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    t_values: Vec<f64>,
    x_values: Vec<f64>,
    exclusion_radius: f64,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|a| a.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
}

impl Grid2D {
    pub fn new(t_values: Vec<f64>, x_values: Vec<f64>, exclusion_radius: f64) -> Result<Self> {
        if t_values.is_empty() || x_values.is_empty() {
            return Err(Error::InvalidInput("grid axes must be nonempty".into()));
        }
        if !strictly_increasing(&t_values) || !strictly_increasing(&x_values) {
            return Err(Error::InvalidInput("grid axes must be strictly increasing".into()));
        }
        if !(exclusion_radius > 0.0) {
            return Err(Error::InvalidInput("exclusion radius must be positive".into()));
        }
        Ok(Self { t_values, x_values, exclusion_radius })
    }

    /// `nt × nx` uniform lattice on `[t_min, t_max] × [x_min, x_max]`.
    pub fn uniform(
        (t_min, t_max, nt): (f64, f64, usize),
        (x_min, x_max, nx): (f64, f64, usize),
        exclusion_radius: f64,
    ) -> Result<Self> {
        if nt == 0 || nx == 0 || (nt > 1 && !(t_min < t_max)) || (nx > 1 && !(x_min < x_max)) {
            return Err(Error::InvalidInput(format!(
                "bad grid spec t=[{t_min},{t_max}]x{nt}, x=[{x_min},{x_max}]x{nx}"
            )));
        }
        Self::new(linspace(t_min, t_max, nt), linspace(x_min, x_max, nx), exclusion_radius)
    }

    /// Same rectangle with both spacings halved (uniform grids only).
    pub fn refined(&self) -> Result<Self> {
        let (t0, t1) = (self.t_values[0], *self.t_values.last().unwrap());
        let (x0, x1) = (self.x_values[0], *self.x_values.last().unwrap());
        Self::uniform((t0, t1, 2 * self.nt() - 1), (x0, x1, 2 * self.nx() - 1), self.exclusion_radius)
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    pub fn nt(&self) -> usize {
        self.t_values.len()
    }

    pub fn nx(&self) -> usize {
        self.x_values.len()
    }

    pub fn len(&self) -> usize {
        self.nt() * self.nx()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, it: usize, ix: usize) -> usize {
        it * self.nx() + ix
    }

    pub fn point(&self, it: usize, ix: usize) -> (f64, f64) {
        (self.t_values[it], self.x_values[ix])
    }

    /// All `(it, ix)` pairs in row-major (t-major) order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nt()).flat_map(move |it| (0..self.nx()).map(move |ix| (it, ix)))
    }

    /// Whether `x` keeps at least the exclusion radius from every pole.
    pub fn admissible(&self, x: f64, poles: &[Complex64]) -> bool {
        poles.iter().all(|q| (Complex64::new(x, 0.0) - q).norm() > self.exclusion_radius)
    }
}

/// Complex samples of a field on a [`Grid2D`], t-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedField {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl TabulatedField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(t, x)` at every grid point.
    pub fn sample(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = grid.indices().map(|(i, j)| {
            let (t, x) = grid.point(i, j);
            f(t, x)
        });
        Self { grid: grid.clone(), values: values.collect() }
    }

    pub fn at(&self, it: usize, ix: usize) -> Complex64 {
        self.values[self.grid.index(it, ix)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Copy scaled so the largest magnitude is one (no-op for the zero field).
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 || !m.is_finite() {
            return self.clone();
        }
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v / m).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_axes() {
        assert!(Grid2D::new(vec![0.0, 0.0], vec![1.0], 0.1).is_err());
        assert!(Grid2D::new(vec![0.0], vec![1.0], 0.0).is_err());
        assert!(Grid2D::new(vec![], vec![1.0], 0.1).is_err());
    }

    #[test]
    fn refinement_halves_spacing() {
        let g = Grid2D::uniform((0.0, 1.0, 5), (-1.0, 1.0, 9), 0.05).unwrap();
        let r = g.refined().unwrap();
        assert_eq!((r.nt(), r.nx()), (9, 17));
        assert!((r.t_values()[1] - 0.125).abs() < 1e-15);
        assert_eq!(r.x_values()[2], g.x_values()[1]);
    }

    #[test]
    fn exclusion_uses_complex_distance() {
        let g = Grid2D::uniform((0.0, 1.0, 2), (0.0, 1.0, 2), 0.1).unwrap();
        assert!(!g.admissible(0.5, &[Complex64::new(0.55, 0.0)]));
        assert!(g.admissible(0.5, &[Complex64::new(0.5, 0.2)]));
    }
}
