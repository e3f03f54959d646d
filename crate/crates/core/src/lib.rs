//! Stabilizer pathfinding: tracking every non-trivial stabilizer of a growing
//! stabilizer state, extracting loss-tolerant teleportation measurement
//! patterns from them, and estimating teleportation rates under qubit loss.

pub mod bits;
pub mod channels;
pub mod error;
pub mod gf2;
pub mod losssim;
pub mod oracle;
pub mod patterns;
pub mod pauli;
pub mod state;
pub mod triviality;

pub use bits::BitSet;
pub use error::{Result, SpfError};
pub use pauli::{Basis, Gate, Letter, PauliOperator};
pub use state::{Combination, MeasurementRecord, Outcome, QubitRef, StabMap, StabilizerState};
pub use triviality::Bipartition;
pub use channels::{build_channel, ChannelGraph, ChannelSpec, Graph};
pub use patterns::{Byproduct, LogicalKind, LogicalOperator, MeasurementPattern, PatternSearch};
