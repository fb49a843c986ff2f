//! Quantum Painlevé II at even β: the Calogero particle system that solves
//! the governing equations, the explicit polynomial 2×2 Lax pair built from
//! it, and numerical certificates for every identity in the chain.
//!
//! Module map:
//! - [`fields`]: polynomials, jets, grids, finite differences, residual reports
//! - [`fpcore`]: Fokker–Planck specs, governing system, Lax restoration, residuals
//! - [`calogero`]: particle states, equations of motion, first integrals, integrator
//! - [`laxbuild`]: explicit polynomial Lax pair from a particle state
//! - [`pii_reference`]: Hastings–McLeod oracle, closed-form κ=1,2 fields, Baik–Rains pair
//! - [`eigenflow`]: transport of the linear system and Fokker–Planck membership checks

pub mod calogero;
pub mod eigenflow;
pub mod error;
pub mod fields;
pub mod fpcore;
pub mod laxbuild;
pub mod ode;
pub mod pii_reference;

pub use error::{Error, Result};
