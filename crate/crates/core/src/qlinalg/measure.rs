use nalgebra::SymmetricEigen;
use rand::Rng;

use super::state::SubsetLayout;
use super::{c, BasisSet, CMatrix, CVector, StateVec};
use crate::{Error, Result};

/// Largest state `factorize` will search for product structure.
const MAX_FACTORIZE_QUBITS: usize = 12;

/// A Schmidt coefficient (squared) below this counts as zero.
const SCHMIDT_TOL: f64 = 1e-10;

/// Projective measurement of the whole state in `basis`.
///
/// Returns the outcome index `j`, drawn with probability `|⟨b_j|ψ⟩|²`, and
/// the collapsed state `|b_j⟩`.
pub fn measure<R: Rng + ?Sized>(
    state: &StateVec,
    basis: &BasisSet,
    rng: &mut R,
) -> Result<(usize, StateVec)> {
    if basis.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: basis.dim(),
        });
    }
    let probs: Vec<f64> = basis
        .vectors()
        .iter()
        .map(|b| b.inner(state).norm_sqr())
        .collect();
    let j = sample_index(&probs, rng);
    Ok((j, basis.vector(j).clone()))
}

#[derive(Clone, Debug)]
pub struct SubsetMeasurement {
    pub outcome: usize,
    pub probability: f64,
    /// Conditional state of the unmeasured qubits (ascending position
    /// order), or `None` when every qubit was measured.
    pub residual: Option<StateVec>,
}

/// Measures the qubits at `positions` jointly in `basis`, whose vectors are
/// laid out over those positions in the order given.
pub fn measure_subset<R: Rng + ?Sized>(
    state: &StateVec,
    positions: &[usize],
    basis: &BasisSet,
    rng: &mut R,
) -> Result<SubsetMeasurement> {
    let layout = SubsetLayout::new(state.qubit_count(), positions)?;
    if basis.dim() != layout.sub_dim {
        return Err(Error::DimensionMismatch {
            expected: layout.sub_dim,
            found: basis.dim(),
        });
    }
    let psi = layout.split(state.amplitudes());
    // Row j holds ⟨b_j| applied to the measured register.
    let projected = basis.matrix().adjoint() * psi;
    let probs: Vec<f64> = projected
        .row_iter()
        .map(|row| row.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let outcome = sample_index(&probs, rng);
    let probability = probs[outcome];
    let residual = if layout.rest.is_empty() {
        None
    } else {
        let row = projected.row(outcome).transpose();
        Some(StateVec::new(row / c(probability.sqrt(), 0.0))?)
    };
    Ok(SubsetMeasurement {
        outcome,
        probability,
        residual,
    })
}

/// One tensor factor of a state: the qubit positions it covers (ascending)
/// and its state over those qubits in that order.
#[derive(Clone, Debug)]
pub struct Factor {
    pub qubits: Vec<usize>,
    pub state: StateVec,
}

/// Splits `state` into irreducible tensor factors.
///
/// Repeatedly finds the smallest qubit subset containing the lowest
/// remaining qubit whose reduced state is pure (largest Schmidt weight
/// within `1e-10` of one). States wider than 12 qubits are returned whole.
pub fn factorize(state: &StateVec) -> Vec<Factor> {
    let k = state.qubit_count();
    let mut remaining: Vec<usize> = (0..k).collect();
    if k > MAX_FACTORIZE_QUBITS || k <= 1 {
        return vec![Factor {
            qubits: remaining,
            state: state.clone(),
        }];
    }
    let mut current = state.clone();
    let mut out = Vec::new();
    while remaining.len() > 1 {
        match smallest_split(&current) {
            Some((subset, head, tail)) => {
                out.push(Factor {
                    qubits: subset.iter().map(|&l| remaining[l]).collect(),
                    state: head,
                });
                remaining = (0..remaining.len())
                    .filter(|l| !subset.contains(l))
                    .map(|l| remaining[l])
                    .collect();
                current = tail;
            }
            None => break,
        }
    }
    out.push(Factor {
        qubits: remaining,
        state: current,
    });
    out
}

fn smallest_split(state: &StateVec) -> Option<(Vec<usize>, StateVec, StateVec)> {
    let m = state.qubit_count();
    for size in 1..m {
        for mask in 0u32..(1 << (m - 1)) {
            if mask.count_ones() as usize != size - 1 {
                continue;
            }
            let subset: Vec<usize> = std::iter::once(0)
                .chain((1..m).filter(|q| mask & (1 << (q - 1)) != 0))
                .collect();
            if let Some((head, tail)) = try_split(state, &subset) {
                return Some((subset, head, tail));
            }
        }
    }
    None
}

fn try_split(state: &StateVec, subset: &[usize]) -> Option<(StateVec, StateVec)> {
    let layout = SubsetLayout::new(state.qubit_count(), subset).ok()?;
    let psi = layout.split(state.amplitudes());
    let rho: CMatrix = &psi * psi.adjoint();
    let purity = rho.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if purity < 1.0 - 2.0 * SCHMIDT_TOL {
        return None;
    }
    let eig = SymmetricEigen::new(rho);
    let (top, weight) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if weight < 1.0 - SCHMIDT_TOL {
        return None;
    }
    let head: CVector = eig.eigenvectors.column(top).into_owned();
    let tail = (head.adjoint() * &psi).transpose();
    Some((StateVec::normalized(head).ok()?, StateVec::normalized(tail).ok()?))
}

/// Inverse-CDF draw from unnormalized weights.
pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}
