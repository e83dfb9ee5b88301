//! Finite-dimensional effect algebra for interferometry and measurement
//! objectivity.
//!
//! * [`linalg`]: matrices, density matrices, effects, tensor products and
//!   partial traces, and the probability functional `(A, X) = Tr[A X]`.
//! * [`superposition`]: superposition sets of two orthogonal states and
//!   interference sensitivity.
//! * [`discrimination`]: effects separating two states.
//! * [`measurement`]: multi-channel premeasurements and coincidence
//!   probabilities of channel readings.
//! * [`theorems`]: verifiers, counterexample searches and a brute-force
//!   effect oracle.

pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod random;
pub mod superposition;
pub mod theorems;

pub use error::{Error, Result};
pub use linalg::{
    complement, kernel_projector, partial_trace, prob, support_projector, tensor, ComplexMatrix, Effect, State, Vector,
    DEFAULT_RANK_CUTOFF, DEFAULT_TOLERANCE,
};
pub use measurement::{ChannelLayout, MeasurementModel, PointerPair, ReadingSet, SupportPadding};
pub use random::{random_effect, random_state, Sampler};
pub use superposition::{InterferenceGrid, SuperpositionSpec};
pub use theorems::{CoefficientGrid, Mutation, Report, Verifier};
