//! Haar-style sampling of states, unitaries, bases and permutations.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, gram_schmidt, BasisSet, CMatrix, CVector, Permutation, StateVec, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(dim, (0..dim).map(|_| gaussian(rng)))
}

/// Normalized complex-Gaussian amplitudes: Haar-distributed pure states.
pub fn random_state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> StateVec {
    loop {
        if let Ok(s) = StateVec::normalized(gaussian_vector(1 << qubits, rng)) {
            return s;
        }
    }
}

/// Gram-Schmidt over `2^qubits` complex-Gaussian vectors.
pub fn random_basis<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> BasisSet {
    let dim = 1usize << qubits;
    loop {
        let raw: Vec<CVector> = (0..dim).map(|_| gaussian_vector(dim, rng)).collect();
        if let Ok(b) = gram_schmidt(&raw) {
            return b;
        }
    }
}

/// Haar-random unitary of size `2^qubits`: columns of [`random_basis`].
pub fn random_unitary<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> CMatrix {
    random_basis(qubits, rng).matrix()
}

pub fn random_permutation<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Permutation {
    let mut map: Vec<usize> = (0..len).collect();
    map.shuffle(rng);
    Permutation::new(map).expect("shuffle is a bijection")
}
