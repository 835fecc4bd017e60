use std::fmt;

use super::{c, log2_exact, CMatrix, CVector, C64, TOL};
use crate::{Error, Result};

/// A normalized pure state over `qubit_count` labeled qubits.
#[derive(Clone, PartialEq)]
pub struct StateVec {
    amps: CVector,
    qubits: usize,
}

impl StateVec {
    /// Wraps an amplitude vector, rejecting non-power-of-two lengths and
    /// vectors whose squared norm is off by more than `TOL`.
    pub fn new(amps: CVector) -> Result<Self> {
        let qubits = log2_exact(amps.len())?;
        let norm_sqr = amps.norm_squared();
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { amps, qubits })
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let qubits = log2_exact(amps.len())?;
        let norm = amps.norm();
        if norm < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amps: amps / c(norm, 0.0),
            qubits,
        })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    /// Real amplitudes, normalized on the way in.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(
            amps.len(),
            amps.iter().map(|&re| c(re, 0.0)),
        ))
    }

    /// Computational basis state `|index⟩` on `qubits` qubits.
    pub fn basis_state(qubits: usize, index: usize) -> Self {
        let dim = 1usize << qubits;
        assert!(index < dim, "basis index {index} out of range for {qubits} qubits");
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self { amps, qubits }
    }

    pub fn zero() -> Self {
        Self::basis_state(1, 0)
    }

    pub fn one() -> Self {
        Self::basis_state(1, 1)
    }

    pub fn plus() -> Self {
        Self::from_real(&[1.0, 1.0]).expect("valid")
    }

    pub fn minus() -> Self {
        Self::from_real(&[1.0, -1.0]).expect("valid")
    }

    /// `(|00⟩ + |11⟩)/√2`, the Bell pair used as a decoy.
    pub fn bell_pair() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, 1.0]).expect("valid")
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut amps = vec![0.0; dim];
        amps[0] = 1.0;
        amps[dim - 1] = 1.0;
        Self::from_real(&amps).expect("valid")
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut amps = vec![0.0; dim];
        for q in 0..qubits {
            amps[1 << q] = 1.0;
        }
        Self::from_real(&amps).expect("valid")
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVec) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVec) -> f64 {
        self.inner(other).norm()
    }

    pub fn approx_eq_up_to_phase(&self, other: &StateVec, tol: f64) -> bool {
        self.dim() == other.dim() && (1.0 - self.overlap(other)).abs() <= tol
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVec) -> StateVec {
        Self {
            amps: self.amps.kronecker(&other.amps),
            qubits: self.qubits + other.qubits,
        }
    }

    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Applies a full-width operator. The operator must be unitary for the
    /// result to stay normalized; this is checked.
    pub fn apply(&self, op: &CMatrix) -> Result<StateVec> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        StateVec::new(op * &self.amps)
    }

    /// Applies `op` to the qubits at `positions` (in that order), identity
    /// elsewhere.
    pub fn apply_on(&self, positions: &[usize], op: &CMatrix) -> Result<StateVec> {
        let layout = SubsetLayout::new(self.qubits, positions)?;
        if op.nrows() != layout.sub_dim || op.ncols() != layout.sub_dim {
            return Err(Error::DimensionMismatch {
                expected: layout.sub_dim,
                found: op.nrows(),
            });
        }
        let split = layout.split(&self.amps);
        StateVec::new(layout.join(&(op * split)))
    }

    /// Reorders qubits: qubit `t` of the result is qubit `order[t]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVec> {
        if order.len() != self.qubits {
            return Err(Error::LengthMismatch {
                expected: self.qubits,
                found: order.len(),
            });
        }
        let layout = SubsetLayout::new(self.qubits, order)?;
        let split = layout.split(&self.amps);
        Ok(Self {
            amps: CVector::from_column_slice(split.column(0).as_slice()),
            qubits: self.qubits,
        })
    }
}

impl fmt::Debug for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVec[{}q](", self.qubits)?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.4}{:+.4}i", a.re, a.im)?;
        }
        write!(f, ")")
    }
}

/// Index bookkeeping for viewing a `k`-qubit amplitude vector as a matrix
/// whose rows run over a chosen qubit subset (in the given order) and whose
/// columns run over the remaining qubits (ascending).
pub(crate) struct SubsetLayout {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub sub_dim: usize,
    pub rest_dim: usize,
    pub rest: Vec<usize>,
}

impl SubsetLayout {
    pub fn new(qubits: usize, positions: &[usize]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = vec![false; qubits];
        for &p in positions {
            if p >= qubits || seen[p] {
                return Err(Error::InvalidPosition { position: p, qubits });
            }
            seen[p] = true;
        }
        let rest: Vec<usize> = (0..qubits).filter(|&q| !seen[q]).collect();
        let dim = 1usize << qubits;
        let bit = |x: usize, q: usize| (x >> (qubits - 1 - q)) & 1;
        let gather = |x: usize, qs: &[usize]| {
            qs.iter()
                .fold(0usize, |acc, &q| (acc << 1) | bit(x, q))
        };
        let rows = (0..dim).map(|x| gather(x, positions)).collect();
        let cols = (0..dim).map(|x| gather(x, &rest)).collect();
        Ok(Self {
            rows,
            cols,
            sub_dim: 1 << positions.len(),
            rest_dim: 1 << rest.len(),
            rest,
        })
    }

    pub fn split(&self, amps: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.sub_dim, self.rest_dim);
        for (x, a) in amps.iter().enumerate() {
            m[(self.rows[x], self.cols[x])] = *a;
        }
        m
    }

    pub fn join(&self, m: &CMatrix) -> CVector {
        CVector::from_iterator(
            self.rows.len(),
            (0..self.rows.len()).map(|x| m[(self.rows[x], self.cols[x])]),
        )
    }
}
