//! Explicit polynomial Lax pair for quantum Painlevé II built from a
//! particle state, with runtime certificates for the structural claims
//! (polynomiality of `B_d`, `L₋`, `B₋` and the degree bounds).

mod build;
mod field;

pub use build::{
    build_bd, build_ld, build_ld_rate, build_lplus, build_pair, build_vpart, degree_audit, BuilderConfig, DegreeEntry,
    DegreeReport, LaxExport, PIILaxResult, Remainders, POLYNOMIALITY_TOLERANCE,
};
pub use field::BuiltLax;
