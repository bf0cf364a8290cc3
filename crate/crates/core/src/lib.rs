//! Matrix product state simulation of quantum circuits.
//!
//! Two MPS engines share the same gate and truncation conventions:
//!
//! * [`MpsState`]: mixed canonical form, QR sweeps move the orthogonality
//!   center to each gate before a two-site SVD update.
//! * [`VidalState`]: Vidal form with explicit bond weights, updated by the
//!   local simple-update rule with no sweeps.
//!
//! [`StateVector`] is the exact dense reference. [`bench`] runs the scaling and
//! fidelity experiments.

pub mod bench;
pub mod circuit;
pub mod error;
pub mod mps;
pub mod statevector;
pub mod tensor;
pub mod vidal;

pub use circuit::{Circuit, Gate, GateKind};
pub use error::{Error, Result};
pub use mps::{fidelity, MpsState};
pub use statevector::StateVector;
pub use tensor::{DenseTensor, TruncationPolicy, C64};
pub use vidal::VidalState;
