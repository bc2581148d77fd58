//! Checks and measurements built on the operators and the propagator.

pub mod convergence;
pub mod dynamics;
pub mod identities;
pub mod initial;
pub mod spectrum;

pub use convergence::{
    bf_doubling_deviation, convergence_cell, convergence_cells, error_curves, loglog_fit, truncation_tail, BfReference,
    BoundReport, ConvergenceCell, ConvergenceReport, ConvergenceSetup, ErrorCurve, LogLogFit,
};
pub use dynamics::{alpha_trace, fit_growth_rate, uniform_grid, AlphaTrace, Flavor, FlavorRun, Observables, Trace};
pub use identities::{inventory, run_identity_suite, IdentityCheck, IdentityReport, SuiteConfig};
pub use initial::{free_diagonal, make_initial_state, InitialKind, InitialState};
pub use spectrum::{bogoliubov_spectrum_check, dispersion, ground_energy, oracle_gaps, SpectrumReport};
