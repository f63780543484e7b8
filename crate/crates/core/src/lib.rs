//! Feasibility solvers for cyclic one-dimensional distance geometry.
//!
//! An instance is a cycle on the real line: `n` vertices, the `n - 1`
//! distances between consecutive vertices, and one closing distance between
//! the first and the last vertex. The closing constraint cannot be checked
//! until the last vertex is placed, so build-up search keeps branching all
//! the way down and the candidate set doubles at every vertex.
//!
//! Three solution paths are provided and cross-validated against each other:
//!
//! * [`bp`]: exact depth-first enumeration of the binary realization tree;
//! * [`mvm`]: the same enumeration phrased as an implicit `2^n x n` sign
//!   matrix applied to the distance chain, streamed row by row;
//! * [`optics`]: a numerical simulator of a spatial-light-modulator
//!   processor that evaluates all rows of that product in parallel and reads
//!   feasibility off a camera frame as a zero-intensity pixel.
//!
//! [`instance`] holds the data model, generators, and the JSON codec.

pub mod bp;
pub mod instance;
pub mod mvm;
pub mod optics;

/// Largest chain length any enumeration path accepts (`2^30` rows streamed).
///
/// Beyond this the exact paths refuse with a `SizeLimit` error rather than
/// silently running for hours.
pub const ENUMERATION_CAP: usize = 30;

pub use bp::{BpError, Realization};
pub use instance::{AugmentedInstance, InstanceError, ParadoxicalInstance};
pub use mvm::{MvmError, ResultVector, SignMatrixSpec};
pub use optics::{IntensityFrame, OpticalConfig, OpticalRun, OpticsError, PhaseMask};
