//! Holevo bound on what Eve's share of one code block says about the message.

use serde::{Deserialize, Serialize};

use super::AttackModel;
use crate::protocol::{encode_block, Bits, ProtocolConfig, Variant};
use crate::qlinalg::{holevo_bound, reduced_density, DensityMatrix, StateVec, MAX_BASIS_DIM};
use crate::{Error, Result};

/// Largest block for which the scrambled ensemble is enumerated; it sums
/// over `(2n)!` orderings.
pub const MAX_SCRAMBLED_QUBITS: usize = 3;

/// Which part of a code block Eve holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveAccess {
    /// The qubits of one block at these positions, in order.
    BlockPositions(Vec<usize>),
    /// All `n` qubits of one block and `n` decoys, in an unknown uniformly
    /// random order.
    ScrambledBlock,
}

/// `χ` of the ensemble `{1/M, ρ_v}` where `ρ_v` is Eve's share of the code
/// state for message value `v`.
pub fn leakage_for_access(config: &ProtocolConfig, access: &EveAccess) -> Result<f64> {
    let m = config.basis().dim();
    if m > MAX_BASIS_DIM {
        return Err(Error::TooLarge(m));
    }
    let n = config.n();
    let codes = (0..m)
        .map(|v| encode_block(&Bits::from_value(v, n), config))
        .collect::<Result<Vec<StateVec>>>()?;
    let p = 1.0 / m as f64;
    let ensemble = match access {
        EveAccess::BlockPositions(positions) => codes
            .iter()
            .map(|s| Ok((p, reduced_density(s, positions)?)))
            .collect::<Result<Vec<_>>>()?,
        EveAccess::ScrambledBlock => {
            if n > MAX_SCRAMBLED_QUBITS {
                return Err(Error::TooLarge(2 * n));
            }
            let decoys = decoy_state(config.variant(), n);
            let orders = permutations(2 * n);
            codes
                .iter()
                .map(|s| Ok((p, scramble(&DensityMatrix::from_pure(s).tensor(&decoys), &orders)?)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    holevo_bound(&ensemble)
}

/// Leakage for the access `attack` gives Eve under `config`'s variant:
/// one qubit per block per round in the multi-round variants, a scrambled
/// block otherwise. Passive Eve learns nothing.
pub fn eve_leakage(config: &ProtocolConfig, attack: &AttackModel) -> Result<f64> {
    if attack.is_passive() {
        return Ok(0.0);
    }
    if config.variant().is_multi_round() {
        (0..config.n()).try_fold(0.0f64, |best, s| {
            Ok(best.max(leakage_for_access(config, &EveAccess::BlockPositions(vec![s]))?))
        })
    } else {
        leakage_for_access(config, &EveAccess::ScrambledBlock)
    }
}

/// Average decoy state over Alice's random choices.
fn decoy_state(variant: Variant, n: usize) -> DensityMatrix {
    if !variant.uses_bell_decoys() {
        return DensityMatrix::maximally_mixed(n);
    }
    let pair = DensityMatrix::from_pure(&StateVec::bell_pair());
    let mut rho: Option<DensityMatrix> = None;
    for _ in 0..n / 2 {
        rho = Some(match rho {
            None => pair.clone(),
            Some(r) => r.tensor(&pair),
        });
    }
    if n % 2 == 1 {
        let single = DensityMatrix::maximally_mixed(1);
        rho = Some(match rho {
            None => single,
            Some(r) => r.tensor(&single),
        });
    }
    rho.expect("n ≥ 1")
}

fn scramble(rho: &DensityMatrix, orders: &[Vec<usize>]) -> Result<DensityMatrix> {
    let permuted = orders
        .iter()
        .map(|o| rho.permute_qubits(o))
        .collect::<Result<Vec<_>>>()?;
    let w = 1.0 / orders.len() as f64;
    let parts: Vec<(f64, &DensityMatrix)> = permuted.iter().map(|r| (w, r)).collect();
    DensityMatrix::mixture(&parts)
}

fn permutations(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    let mut used = vec![false; len];
    extend(len, &mut current, &mut used, &mut out);
    out
}

fn extend(len: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for i in 0..len {
        if !used[i] {
            used[i] = true;
            current.push(i);
            extend(len, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}
