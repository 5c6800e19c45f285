//! Qudit state-vector simulation of threshold d-level quantum secret sharing.
//!
//! The reconstructor entangles every participant's qudit with its own, each
//! participant imprints its shadow as a phase, the reconstructor disentangles
//! the register again and an inverse QFT on its qudit reveals
//! `Σ s_r mod d`. See [`protocol`] for the stage-by-stage description.
//!
//! Modules:
//! - [`state`]: dense registers and strided gate kernels
//! - [`gates`]: QFT, phase operator and d-level CNOT constructors
//! - [`dealing`]: shadow sets (random and Shamir)
//! - [`protocol`]: the reconstruction run with per-stage traces
//! - [`compiler`]: qubit circuits for `d = 2^n`
//! - [`oracle`]: dense Kronecker-product reference used to check the kernels

pub mod compiler;
pub mod dealing;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod oracle;
pub mod protocol;
pub mod state;

pub use dealing::{expected_secret, make_shadows_random, make_shadows_shamir, ShadowSet};
pub use error::{Error, Result};
pub use gates::{CnotMode, GateSpec};
pub use matrix::Matrix;
pub use protocol::{run_tdqss, Backend, CnotScheme, ProtocolConfig, ProtocolResult, Stage, Trace};
pub use state::{MeasurementRecord, Permutation, RegisterShape, StateVector};
