//! Occupation-number bases, joint tracer/boson bases, state vectors and
//! single-mode ladder operators.

mod basis;
pub mod combinatorics;
mod joint;
pub mod ladder;
mod state;

pub use basis::{BasisTag, ExcitationBasis, OccupationBasis, SectorBasis};
pub use joint::JointBasis;
pub use state::StateVector;
