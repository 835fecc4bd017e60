use serde::{Deserialize, Serialize};

use crate::qlinalg::{concurrence, reduced_density, StateVec};
use crate::{Error, Result};

/// Squared-concurrence terms of the three-qubit monogamy inequality, with
/// A, B, C the qubits at positions 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub e_ac: f64,
    pub e_bc: f64,
    pub e_ab_c: f64,
    /// `e_ab_c − e_ac − e_bc`; nonnegative up to rounding.
    pub slack: f64,
}

/// Pure states only: there `E(AB:C) = 4·det ρ_C`.
pub fn ckw_monogamy(state: &StateVec) -> Result<MonogamyReport> {
    if state.qubit_count() != 3 {
        return Err(Error::WrongQubitCount {
            expected: 3,
            found: state.qubit_count(),
        });
    }
    let e_ac = concurrence(&reduced_density(state, &[0, 2])?)?.powi(2);
    let e_bc = concurrence(&reduced_density(state, &[1, 2])?)?.powi(2);
    let e_ab_c = reduced_density(state, &[2])?.qubit_tangle().max(0.0);
    Ok(MonogamyReport {
        e_ac,
        e_bc,
        e_ab_c,
        slack: e_ab_c - e_ac - e_bc,
    })
}
