//! Simulation and analysis of deterministic secure quantum communication
//! built from arbitrary orthonormal bases.

pub mod adversary;
mod error;
pub mod harness;
pub mod protocol;
pub mod qlinalg;
pub mod registry;

pub use adversary::{AttackModel, BasisPolicy, Eavesdropper};
pub use error::{Error, Result};
pub use harness::{EfficiencyReport, ExperimentSpec, TrialStats};
pub use protocol::{Bits, ProtocolConfig, RunReport, Variant};
pub use qlinalg::{BasisSet, Permutation, StateVec};
