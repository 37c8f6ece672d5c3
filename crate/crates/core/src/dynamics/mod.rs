//! Open-system time evolution.
//!
//! Two solvers live here. [`lindblad_evolve`] integrates the time-dependent
//! Lindblad master equation with a fixed-step RK4 scheme in the interaction
//! picture: the full diagonal of the Hamiltonian (bare mode frequencies,
//! Kerr shifts, the transmon frequency including its dynamical tuning) is
//! absorbed into a piecewise-constant rotating frame, phases on sparse
//! matrix elements are advanced by exact rotators, and only the residual
//! generator is stepped numerically. [`bloch_redfield_evolve`] treats the
//! static NR-SC model in its exact eigenbasis with bath spectral functions
//! and a partial secular approximation.

mod fit;
mod generator;
mod integrator;
mod lindblad;
mod redfield;

pub use fit::extract_decay_time;
pub use generator::{Coeff, Envelope, Generator, HamTerm, Segment, SparseOp};
pub use integrator::{Frame, IntegratorConfig};
pub use lindblad::{
    lindblad_evolve, lindblad_evolve_observed, thermal_dissipators, DensityMatrix, LindbladSpec,
};
pub use redfield::{bloch_redfield_evolve, NoiseCoupling, SpectralFunction};

/// Convert a rate quoted in Hz (1/s) to the integrator's 1/us unit.
pub(crate) const HZ_TO_PER_US: f64 = 1e-6;
