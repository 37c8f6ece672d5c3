//! Pulse-level simulator for a pair of anharmonic nanomechanical qubits
//! coupled through a transmon.
//!
//! The crate models the elementary building block of an electromechanical
//! quantum processor: two nanoresonators (NRs) hosting the qubits in their
//! two lowest vibrational levels, with an interposed transmon whose virtual
//! excitations mediate an effective XY interaction. It provides
//!
//! * truncated-Fock operator algebra and matrix functions ([`operators`],
//!   [`cmatrix`]),
//! * Hamiltonian construction and closed-form effective parameters
//!   ([`model`]),
//! * open-system time evolution: a fixed-step RK4 Lindblad integrator in the
//!   interaction picture and a secular Bloch-Redfield solver ([`dynamics`]),
//! * gate protocols rendered as time-dependent control schedules ([`pulses`]),
//! * Trotter compilation of two-spin Hamiltonians onto the native gate set
//!   ([`compiler`]),
//! * fidelity / leakage / observable post-processing ([`analysis`]),
//! * named, reproducible experiments emitting numeric tables ([`runner`]),
//!   and the acceptance checks behind `verify` ([`acceptance`]).
//!
//! # Units
//!
//! Frequencies are stored as plain cycles-per-microsecond values quoted in
//! MHz (the `omega/2pi` convention); the `2*pi` factor is applied once, when
//! a Hamiltonian is assembled, so generator entries are angular rates in
//! rad/us. Times are in microseconds. Decay and dephasing rates are inverse
//! lifetimes in Hz (1/s): a jump operator with rate `gamma` Hz gives a
//! population lifetime `T1 = 1/gamma` seconds.

pub mod analysis;
pub mod acceptance;
pub mod cmatrix;
pub mod compiler;
pub mod dynamics;
pub mod model;
pub mod operators;
pub mod pulses;
pub mod runner;

mod error;

pub use cmatrix::CMatrix;
pub use error::{Error, Result};

/// 2*pi, the one angular-frequency conversion factor used everywhere.
pub const TWO_PI: f64 = std::f64::consts::TAU;
