//! Independent oracles for the κ=1,2 cases: the Hastings–McLeod solution of
//! Painlevé II, the closed-form governing fields it generates, the map to
//! particle states and the Baik–Rains pair.

mod airy;
mod cheb;
mod hm;
mod reference;

pub use airy::{airy, airy_ai, airy_asymptotic, airy_series, SERIES_RADIUS};
pub use hm::{
    left_asymptotic, solve_hastings_mcleod, HMSolution, HmInvariants, HmPoint, DEFAULT_POINTS, DEFAULT_TOLERANCE,
    DEFAULT_WINDOW,
};
pub use reference::{
    baik_rains_pair, hm_flow_consistency, hm_potential, particles_from_hm, reference_fields, reference_poles,
    BaikRainsLax, FlowConsistency, FpNormalization, DOUBLE_POLE_FLOOR,
};
