//! Exact density-matrix simulation of a three-state truncated U(1) rotor chain
//! ((1+1)d scalar electrodynamics), used to compare how qubit and qutrit
//! encodings tolerate gate noise when extracting the mass gap.
//!
//! The crate is organised around one experiment: prepare a trial state plus an
//! ancilla, Trotter-evolve it with noise channels scheduled per gate block,
//! record the out-of-time correlator, Fourier-transform the series, and score
//! the extracted mass against the eigenphase prediction of the Trotter step.
//!
//! - [`linalg`] — dense complex matrices, Hermitian/unitary eigensolvers.
//! - [`register`] — mixed-dimension qudit registers and operator embedding.
//! - [`density`] — density matrices, local unitary/channel application.
//! - [`channels`] — Pauli decoherence and amplitude-damping channels.
//! - [`model`] — rotor Hamiltonian, trial state, Trotter blocks, spectra.
//! - [`encoding`] — qubit/qutrit circuit blocks, gate costs, noise schedules.
//! - [`pipeline`] — one full noisy run: prepare, evolve, record, extract.
//! - [`sweep`] — parameter grids, studies, contour fits, CSV emission.
//! - [`validate`] — runtime invariant suite backing the `validate` command.

pub mod channels;
pub mod density;
pub mod encoding;
pub mod error;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod register;
pub mod sweep;
pub mod validate;

pub use channels::{
    damping_channel_qubit, damping_channel_qutrit, pauli_channel_qubit, pauli_channel_qutrit,
    KrausChannel, MixedUnitaryChannel, NoiseChannel, NoiseModel,
};
pub use density::DensityMatrix;
pub use encoding::{CircuitBlock, CostTable, Encoding, EncodingKind};
pub use error::{Result, SimError};
pub use model::ModelParams;
pub use linalg::CMat;
pub use register::RegisterShape;

/// Crate version reported in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
