//! Steady-state simulation of a laser-driven optomechanical cavity in the
//! dispersive regime, where the drive detuning stays clear of the mechanical
//! sidebands and phonons enter through multiphonon processes of order
//! chi^(2N), chi = g / omega.
//!
//! The crate builds three generators for the two-mode problem: the full
//! untransformed Liouvillian (used as an oracle), the polaron-transformed
//! secular generator truncated at a chosen multiphonon order, and the reduced
//! map on the phonon-diagonal subspace the stationary distribution actually
//! lives in. Stationary states come from a sparse null-space solve with a
//! trace constraint; observables (mean occupations, g2 of both modes, higher
//! phonon correlations, the Kerr peak comb) are read off the joint
//! photon-phonon distribution.

pub mod config;
pub mod error;
pub mod liouvillian;
pub mod observables;
pub mod operators;
pub mod params;
pub mod secular;
pub mod steady;
pub mod superop;
pub mod sweep;
pub mod verify;

pub use config::Config;
pub use error::{Error, Result};
pub use liouvillian::{
    full_liouvillian, phonon_diagonal_generator, transformed_liouvillian, GeneratorBundle,
    ReducedGenerator,
};
pub use observables::{
    appendix_b_residual, fixed_mirror_reference, full_record, observables_from_distribution,
    Distribution, ObservablesRecord,
};
pub use operators::{
    annihilation, creation, embed, identity, number, polaron_unitary, DensityMatrix, Operator,
    Subsystem, C64,
};
pub use params::{validate_regime, ExpansionOrder, FockCutoffs, RegimeDiagnostic, SystemParams};
pub use secular::{
    chi4_reference_superop, enumerate_damping_terms, secular_damping_superop,
    secular_exponent_operator, TermDescriptor,
};
pub use steady::{converge_cutoffs, propagate, steady_state, steady_state_reduced, SolveReport, SolverOptions};
pub use superop::{superop_sandwich, KronTerm, Superoperator};
pub use sweep::{
    detect_peaks, emit_plot_script, read_series, run_sweep, write_csv, CutoffPolicy, PeakReport,
    SweepAxis, SweepRow, SweepSpec,
};
