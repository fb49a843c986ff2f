//! Calogero particles in the time-dependent quartic potential: state,
//! equations of motion, first integrals, initializer, integrator and the
//! pole-form governing fields they generate.

mod fields;
mod init;
mod io;
mod state;
mod trajectory;

pub use fields::{governing_fields_from_state, PoleFields, PoleProduct, PoleSlice};
pub use init::{init_state, Anchor, INIT_TOLERANCE};
pub use io::{read_trajectory_csv, trajectory_csv_header, write_trajectory_csv};
pub use state::{coulomb_sums, min_separation, ParticleState, Rates, COLLISION_TOLERANCE};
pub use trajectory::{
    compatibility_check, integrate, residue_relation, residue_relation_check, StateJets, StateSource, Trajectory,
};
