//! Exact finite-mode numerics for a tracer particle coupled to a mean-field
//! Bose gas on the unit torus, and for its Bogoliubov-Froehlich effective
//! model.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: plane-wave modes, kinetic energies, validated potentials.
//! * [`fock`]: N-boson sector and capped excitation Fock bases with perfect
//!   ranking, joint tracer bases, state vectors.
//! * [`operators`]: sparse assembly of the many-body, auxiliary,
//!   Bogoliubov and Bogoliubov-Froehlich Hamiltonians, the excitation map,
//!   and momentum blocks.
//! * [`propagator`]: Krylov time evolution with a dense eigen-decomposition
//!   oracle.
//! * [`diagnostics`]: operator identity checks, excitation growth, error
//!   curves against `N`, and the Bogoliubov dispersion check.
//! * [`runner`]: experiment configuration, JSON-lines records and the
//!   subcommands behind the `bfdyn` binary.

pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod operators;
pub mod propagator;
pub mod runner;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
