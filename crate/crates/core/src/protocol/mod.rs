//! The four protocol variants, from message bits to decoded bits.

mod bits;
mod codec;
mod config;
pub mod decoy;
mod report;
mod run;

pub use bits::Bits;
pub use codec::{code_index, decode_block, encode_block};
pub use config::{basis_preset, BasisChoice, ConfigDocument, FamilyChoice, ProtocolConfig, Variant};
pub use decoy::{
    bb84_decoy_check, bell_decoy_check, dress_with_decoys, threshold_decide, Decision, DecoyKind,
    DecoySpec, MubState,
};
pub use report::{ClassicalMessage, Party, Purpose, RunReport, Transcript};
pub use run::{run, run_dsqc, run_qsdc};
