//! Coherence of quantum states and the coherence power of unitary operators.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`], [`state`], [`operator`]: dense complex matrices, validated
//!   density matrices, pure states, unitaries and Hamiltonians, plus the
//!   canonical constructors (x-rotation, discrete Fourier matrix, Haar
//!   sampling).
//! * [`measures`]: the l1-norm and relative-entropy coherence measures and
//!   the coherence gain of a unitary on a given input state.
//! * [`optim`]: pure-state parameterization, Nelder-Mead ascent and an
//!   exhaustive grid oracle.
//! * [`power`]: closed forms, incoherent-restricted scans, multistart global
//!   optimization and generator (Hamiltonian) power.
//! * [`report`] and [`cli`]: CSV/JSON reports and the `cohpower` command line.

pub mod cli;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod operator;
pub mod optim;
pub mod power;
pub mod report;
pub mod reproduce;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use measures::{c_l1, c_rel_ent, gain, gain_pure, CoherenceMeasureId};
pub use operator::{
    fourier_unitary, haar_random_unitary, identity_unitary, rotation_x, HamiltonianOperator,
    UnitaryOperator,
};
pub use optim::{
    brute_force_power, decode, encode, local_maximize, GeneratorConfig, OptimizerConfig,
    StateParams,
};
pub use power::{
    generator_power, global_power, incoherent_l1_power, incoherent_relent_power, qubit_l1_power,
    Diagnostics, Method, PowerEstimate,
};
pub use state::{density_from_pure, dephase, von_neumann_entropy, DensityMatrix, PureState};

pub use num_complex::Complex64;
