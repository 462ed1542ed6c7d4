//! One-axis-twisting (OAT) dynamics of a driven Tavis-Cummings model.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex operators with basis bookkeeping, Hermitian
//!   eigendecomposition, exponentials, Kronecker products and partial traces.
//! * [`spin`] and [`boson`]: the collective-spin (Dicke) space and the truncated
//!   Fock space of the cavity mode, with the initial states used throughout.
//! * [`model`]: Hamiltonian builders and the cavity-drive waveforms.
//! * [`propagation`]: unitary and Lindblad time evolution.
//! * [`analytics`]: closed-form reduced states, moments, minimal variances and
//!   GHZ fidelities.
//! * [`observables`]: squeezing parameter, fidelities, purity and sphere maps.
//! * [`experiments`]: declarative scenarios, presets and sweeps behind the
//!   `oatsim` binary.

pub mod analytics;
pub mod boson;
mod clebsch;
pub mod error;
pub mod experiments;
pub mod model;
pub mod numerics;
pub mod observables;
pub mod propagation;
pub mod spin;
pub mod tolerances;

pub use error::{Error, Result};
pub use numerics::{BasisTag, OperatorMatrix, QuantumState};
pub use tolerances::TOL;

/// Complex scalar used for every amplitude and matrix entry.
pub type C64 = num_complex::Complex64;
