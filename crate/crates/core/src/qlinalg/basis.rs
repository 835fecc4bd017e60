use serde::{Deserialize, Serialize};

use super::{
    c, log2_exact, unitarity_deviation, CMatrix, CVector, StateVec, DEPENDENCE_TOL,
    MAX_BASIS_DIM, TOL,
};
use crate::{Error, Result};

/// An orthonormal basis of `dim = 2^n` states on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    vectors: Vec<StateVec>,
}

impl BasisSet {
    /// Validates that `vectors` is a complete orthonormal set.
    pub fn new(vectors: Vec<StateVec>) -> Result<Self> {
        let dim = vectors.len();
        log2_exact(dim)?;
        if dim > MAX_BASIS_DIM {
            return Err(Error::TooLarge(dim));
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        let basis = Self { vectors };
        let deviation = basis.orthonormality_deviation();
        if deviation >= TOL {
            return Err(Error::NotOrthonormal(deviation));
        }
        Ok(basis)
    }

    pub fn computational(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            vectors: (0..dim).map(|j| StateVec::basis_state(qubits, j)).collect(),
        }
    }

    /// `{|+⟩, |−⟩}`.
    pub fn hadamard() -> Self {
        Self {
            vectors: vec![StateVec::plus(), StateVec::minus()],
        }
    }

    /// Bell basis ordered `(|00⟩+|11⟩)/√2, (|00⟩−|11⟩)/√2, (|01⟩+|10⟩)/√2,
    /// (|01⟩−|10⟩)/√2`. Index 0 is the decoy pair state.
    pub fn bell() -> Self {
        let rows: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
        ];
        Self {
            vectors: rows
                .iter()
                .map(|r| StateVec::from_real(r).expect("valid"))
                .collect(),
        }
    }

    /// GHZ-type basis on `qubits ≥ 1` qubits: `(|x⟩ ± |x̄⟩)/√2` for every
    /// `x` with leading bit 0, plus sign in the even slot.
    pub fn ghz(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let half = dim / 2;
        let mut vectors = Vec::with_capacity(dim);
        for x in 0..half {
            let partner = (dim - 1) ^ x;
            for sign in [1.0, -1.0] {
                let mut amps = vec![0.0; dim];
                amps[x] = 1.0;
                amps[partner] = sign;
                vectors.push(StateVec::from_real(&amps).expect("valid"));
            }
        }
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn qubit_count(&self) -> usize {
        self.vectors[0].qubit_count()
    }

    pub fn vector(&self, j: usize) -> &StateVec {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[StateVec] {
        &self.vectors
    }

    /// Product basis; index `i·other.dim() + j` holds `self[i] ⊗ other[j]`.
    pub fn tensor(&self, other: &BasisSet) -> BasisSet {
        let vectors = self
            .vectors
            .iter()
            .flat_map(|a| other.vectors.iter().map(move |b| a.tensor(b)))
            .collect();
        Self { vectors }
    }

    /// The relabeled basis `{b_j = a_perm(j)}`.
    pub fn relabel(&self, perm: &Permutation) -> Result<BasisSet> {
        check_len(perm.len(), self.dim())?;
        Ok(Self {
            vectors: (0..self.dim())
                .map(|j| self.vectors[perm.apply(j)].clone())
                .collect(),
        })
    }

    /// Matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> CMatrix {
        let dim = self.dim();
        CMatrix::from_fn(dim, dim, |r, col| self.vectors[col].amplitudes()[r])
    }

    /// Largest entry of `|G − I|` for the Gram matrix `G`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let m = self.matrix();
        let gram = m.adjoint() * &m;
        super::max_abs(&(gram - CMatrix::identity(self.dim(), self.dim())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<BasisDocument>(text)?.into_basis()
    }
}

/// JSON form of a basis: `{"n": 1, "vectors": [[[1,0],[0,0]], …], "orthonormal": true}`.
/// When `orthonormal` is false the vectors only need to be linearly
/// independent and are orthonormalized on import.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisDocument {
    pub n: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub orthonormal: bool,
}

impl BasisDocument {
    pub fn from_basis(basis: &BasisSet) -> Self {
        Self {
            n: basis.qubit_count(),
            vectors: basis
                .vectors()
                .iter()
                .map(|v| v.amplitudes().iter().map(|a| [a.re, a.im]).collect())
                .collect(),
            orthonormal: true,
        }
    }

    pub fn into_basis(self) -> Result<BasisSet> {
        let dim = 1usize
            .checked_shl(self.n as u32)
            .filter(|&d| d <= MAX_BASIS_DIM)
            .ok_or(Error::TooLarge(usize::MAX))?;
        check_len(self.vectors.len(), dim)?;
        let raw: Vec<CVector> = self
            .vectors
            .iter()
            .map(|v| {
                check_len(v.len(), dim)?;
                Ok(CVector::from_iterator(dim, v.iter().map(|[re, im]| c(*re, *im))))
            })
            .collect::<Result<_>>()?;
        if self.orthonormal {
            BasisSet::new(raw.into_iter().map(StateVec::new).collect::<Result<_>>()?)
        } else {
            gram_schmidt(&raw)
        }
    }
}

/// Orthonormalizes `M = 2^n` linearly independent vectors of dimension `M`.
///
/// Each input is normalized first, then projected twice against the vectors
/// already accepted. A residual below `DEPENDENCE_TOL` after the first pass
/// is reported as `LinearDependence`.
pub fn gram_schmidt(vectors: &[CVector]) -> Result<BasisSet> {
    let dim = vectors.len();
    log2_exact(dim)?;
    if dim > MAX_BASIS_DIM {
        return Err(Error::TooLarge(dim));
    }
    let mut out: Vec<CVector> = Vec::with_capacity(dim);
    for (index, x) in vectors.iter().enumerate() {
        check_dim(x.len(), dim)?;
        let norm = x.norm();
        if norm < DEPENDENCE_TOL {
            return Err(Error::LinearDependence {
                index,
                residual: norm,
            });
        }
        let mut v = x / c(norm, 0.0);
        for pass in 0..2 {
            for q in &out {
                let proj = q.dotc(&v);
                v.axpy(-proj, q, c(1.0, 0.0));
            }
            if pass == 0 {
                let residual = v.norm();
                if residual < DEPENDENCE_TOL {
                    return Err(Error::LinearDependence { index, residual });
                }
            }
        }
        let n = v.norm();
        out.push(v / c(n, 0.0));
    }
    Ok(BasisSet {
        vectors: out
            .into_iter()
            .map(StateVec::new)
            .collect::<Result<_>>()?,
    })
}

/// A bijection on `{0, …, len−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("{map:?}")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            map: (0..len).collect(),
        }
    }

    /// `i ↦ i + 1 (mod len)`.
    pub fn cycle(len: usize) -> Self {
        Self {
            map: (0..len).map(|i| (i + 1) % len.max(1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Self { map: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Permutation) -> Result<Self> {
        check_len(first.len(), self.len())?;
        Ok(Self {
            map: first.map.iter().map(|&i| self.map[i]).collect(),
        })
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

/// `U = Σ_j |a_perm(j)⟩⟨a_j|`, which sends `|a_j⟩` to `|a_perm(j)⟩`.
pub fn permutation_unitary(basis: &BasisSet, perm: &Permutation) -> Result<CMatrix> {
    check_len(perm.len(), basis.dim())?;
    change_of_basis_unitary(basis, &basis.relabel(perm)?)
}

/// `U = Σ_j |to_j⟩⟨from_j|` for two orthonormal bases of equal dimension.
pub fn change_of_basis_unitary(from: &BasisSet, to: &BasisSet) -> Result<CMatrix> {
    check_dim(to.dim(), from.dim())?;
    Ok(to.matrix() * from.matrix().adjoint())
}

/// `M` encoding unitaries together with the index of the initial state
/// they act on.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryFamily {
    ops: Vec<CMatrix>,
    anchor: usize,
}

impl UnitaryFamily {
    /// Checks shape and unitarity of every op; orthogonality against a
    /// basis is a separate question, see [`verify_orthogonal_family`].
    pub fn new(ops: Vec<CMatrix>, anchor: usize) -> Result<Self> {
        let dim = ops.len();
        log2_exact(dim)?;
        if anchor >= dim {
            return Err(Error::IndexOutOfRange { index: anchor, dim });
        }
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.nrows(),
                });
            }
            let deviation = unitarity_deviation(op);
            if deviation >= TOL {
                return Err(Error::NonUnitary(deviation));
            }
        }
        Ok(Self { ops, anchor })
    }

    pub fn dim(&self) -> usize {
        self.ops.len()
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn op(&self, j: usize) -> &CMatrix {
        &self.ops[j]
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Reorders the ops so that `result.op(v) = self.op(order[v])`.
    pub fn reindexed(&self, order: &Permutation) -> Result<Self> {
        check_len(order.len(), self.dim())?;
        Ok(Self {
            ops: (0..self.dim())
                .map(|v| self.ops[order.apply(v)].clone())
                .collect(),
            anchor: self.anchor,
        })
    }
}

/// The symmetric encoding family anchored at `|a_i⟩`:
///
/// ```text
/// U_i     = I
/// U_(j≠i) = |a_i⟩⟨a_j| + |a_j⟩⟨a_i| + Σ_(k≠i,j) |a_k⟩⟨a_k|
/// ```
///
/// so that `U_j|a_i⟩ = |a_j⟩`. Every op is Hermitian and unitary.
pub fn hermitian_family(basis: &BasisSet, anchor: usize) -> Result<UnitaryFamily> {
    let dim = basis.dim();
    if anchor >= dim {
        return Err(Error::IndexOutOfRange { index: anchor, dim });
    }
    let a = |k: usize| basis.vector(k).amplitudes();
    let outer = |x: usize, y: usize| a(x) * a(y).adjoint();
    let ops = (0..dim)
        .map(|j| {
            if j == anchor {
                return CMatrix::identity(dim, dim);
            }
            let mut u = outer(anchor, j) + outer(j, anchor);
            for k in (0..dim).filter(|&k| k != anchor && k != j) {
                u += outer(k, k);
            }
            u
        })
        .collect();
    Ok(UnitaryFamily { ops, anchor })
}

/// True iff `|⟨a_i|U_j†U_k|a_i⟩| < TOL` for all `j ≠ k`, where `i` is the
/// family's anchor.
pub fn verify_orthogonal_family(family: &UnitaryFamily, basis: &BasisSet) -> bool {
    if family.dim() != basis.dim() || family.anchor() >= basis.dim() {
        return false;
    }
    let anchor = basis.vector(family.anchor()).amplitudes();
    let images: Vec<CVector> = family.ops().iter().map(|u| u * anchor).collect();
    for j in 0..images.len() {
        for k in (j + 1)..images.len() {
            if images[j].dotc(&images[k]).norm() >= TOL {
                return false;
            }
        }
    }
    true
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
