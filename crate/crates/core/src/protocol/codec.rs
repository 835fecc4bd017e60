//! The fixed map between `n`-bit strings and code states.
//!
//! The bit string with big-endian value `v` is encoded by `family.op(v)`,
//! so all zeros uses the first op and all ones the last. Bob measures in the
//! code basis `{|a_k⟩}` (the same set as `{|b_j⟩}`, listed in its original
//! order); an outcome `k` therefore decodes to `v = perm⁻¹(k)`.

use super::{Bits, ProtocolConfig};
use crate::qlinalg::StateVec;
use crate::{Error, Result};

/// `U_v |a_anchor⟩` for the message value `v` of `bits`.
pub fn encode_block(bits: &Bits, config: &ProtocolConfig) -> Result<StateVec> {
    if bits.len() != config.n() {
        return Err(Error::LengthMismatch {
            expected: config.n(),
            found: bits.len(),
        });
    }
    config.initial_state().apply(config.family().op(bits.value()))
}

/// Bits carried by code-basis outcome `outcome`.
pub fn decode_block(outcome: usize, config: &ProtocolConfig) -> Result<Bits> {
    let dim = config.basis().dim();
    if outcome >= dim {
        return Err(Error::IndexOutOfRange {
            index: outcome,
            dim,
        });
    }
    let value = config.output_perm().inverse().apply(outcome);
    Ok(Bits::from_value(value, config.n()))
}

/// Code-basis index of the state that carries `bits`.
pub fn code_index(bits: &Bits, config: &ProtocolConfig) -> usize {
    config.output_perm().apply(bits.value())
}
