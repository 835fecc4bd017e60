use serde::{Deserialize, Serialize};

use super::Bits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    DecoyCoordinates,
    OrderDisclosure,
    Acknowledgment,
    EavesdropCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub sender: Party,
    pub purpose: Purpose,
    pub bits: usize,
}

/// Classical traffic over the authenticated channel, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript(Vec<ClassicalMessage>);

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, sender: Party, purpose: Purpose, bits: usize) {
        self.0.push(ClassicalMessage {
            sender,
            purpose,
            bits,
        });
    }

    pub fn messages(&self) -> &[ClassicalMessage] {
        &self.0
    }

    pub fn bits_for(&self, purpose: Purpose) -> usize {
        self.0
            .iter()
            .filter(|m| m.purpose == purpose)
            .map(|m| m.bits)
            .sum()
    }

    /// Classical bits charged to decoding. Eavesdropping checks are free.
    pub fn decoding_bits(&self) -> usize {
        self.bits_for(Purpose::OrderDisclosure)
    }
}

/// Outcome of one protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub decoded_bits: Option<Bits>,
    pub aborted: bool,
    pub decoy_error_rate: f64,
    pub rounds: usize,
    pub c: u64,
    pub q: u64,
    pub b: u64,
    pub eve_leakage_bits: Option<f64>,
    #[serde(default)]
    pub decoys_checked: usize,
    #[serde(default)]
    pub decoy_errors: usize,
    #[serde(skip)]
    pub transcript: Transcript,
}
