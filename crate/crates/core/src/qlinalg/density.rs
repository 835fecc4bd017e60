use nalgebra::SymmetricEigen;

use super::state::SubsetLayout;
use super::{c, kron, log2_exact, max_abs, pauli_y, CMatrix, StateVec, TOL};
use crate::{Error, Result};

/// A Hermitian, unit-trace, positive semidefinite matrix over `k` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    qubits: usize,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}×{} is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let qubits = log2_exact(entries.nrows())?;
        let hermitian_gap = max_abs(&(&entries - entries.adjoint()));
        if hermitian_gap > TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (gap {hermitian_gap:.3e})"
            )));
        }
        let trace = entries.trace();
        if (trace - c(1.0, 0.0)).norm() > TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {:.12} ≠ 1",
                trace.re
            )));
        }
        let rho = Self { entries, qubits };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &StateVec) -> Self {
        Self {
            entries: state.projector(),
            qubits: state.qubit_count(),
        }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            entries: CMatrix::identity(dim, dim) / c(dim as f64, 0.0),
            qubits,
        }
    }

    /// Convex combination `Σ p_x ρ_x`; weights must be a probability vector.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        check_probabilities(parts.iter().map(|(p, _)| *p))?;
        let Some((_, first)) = parts.first() else {
            return Err(Error::ProbabilityNotNormalized(0.0));
        };
        let dim = first.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            sum += &rho.entries * c(*p, 0.0);
        }
        Ok(Self {
            entries: hermitize(sum),
            qubits: first.qubits,
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues in no particular order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            entries: kron(&self.entries, &other.entries),
            qubits: self.qubits + other.qubits,
        }
    }

    /// Partial trace keeping `keep` (result qubits in the order given).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = SubsetLayout::new(self.qubits, keep)?;
        let mut out = CMatrix::zeros(layout.sub_dim, layout.sub_dim);
        let dim = self.dim();
        for x in 0..dim {
            for y in 0..dim {
                if layout.cols[x] == layout.cols[y] {
                    out[(layout.rows[x], layout.rows[y])] += self.entries[(x, y)];
                }
            }
        }
        Ok(Self {
            entries: out,
            qubits: keep.len(),
        })
    }

    /// Reorders qubits: qubit `t` of the result is qubit `order[t]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<DensityMatrix> {
        if order.len() != self.qubits {
            return Err(Error::LengthMismatch {
                expected: self.qubits,
                found: order.len(),
            });
        }
        let layout = SubsetLayout::new(self.qubits, order)?;
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            for y in 0..dim {
                out[(layout.rows[x], layout.rows[y])] = self.entries[(x, y)];
            }
        }
        Ok(Self {
            entries: out,
            qubits: self.qubits,
        })
    }

    /// `4·det ρ` for a single qubit: the tangle of a pure state across
    /// the cut that isolates this qubit.
    pub(crate) fn qubit_tangle(&self) -> f64 {
        let e = &self.entries;
        4.0 * (e[(0, 0)] * e[(1, 1)] - e[(0, 1)] * e[(1, 0)]).re
    }
}

/// Reduced state of `state` on the qubits in `keep`.
pub fn reduced_density(state: &StateVec, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = SubsetLayout::new(state.qubit_count(), keep)?;
    let psi = layout.split(state.amplitudes());
    Ok(DensityMatrix {
        entries: hermitize(&psi * psi.adjoint()),
        qubits: keep.len(),
    })
}

/// `S(ρ) = −Σ λ log₂ λ`, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    s.clamp(0.0, rho.qubit_count() as f64)
}

/// Holevo quantity `χ = S(Σ p_x ρ_x) − Σ p_x S(ρ_x)`, in bits.
pub fn holevo_bound(ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    let parts: Vec<(f64, &DensityMatrix)> = ensemble.iter().map(|(p, r)| (*p, r)).collect();
    let average = DensityMatrix::mixture(&parts)?;
    let conditional: f64 = ensemble
        .iter()
        .map(|(p, rho)| p * von_neumann_entropy(rho))
        .sum();
    Ok((von_neumann_entropy(&average) - conditional).max(0.0))
}

/// Wootters concurrence of a two-qubit state.
///
/// The `λ_i` are square roots of the eigenvalues of `ρ ρ̃`, obtained here
/// from the Hermitian matrix `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped = &yy * rho.entries.conjugate() * &yy;
    let sqrt_rho = psd_sqrt(&rho.entries);
    let r = hermitize(&sqrt_rho * flipped * &sqrt_rho);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(value.clamp(0.0, 1.0))
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = hermitize(&rho.entries - &sigma.entries);
    let sum: f64 = SymmetricEigen::new(diff)
        .eigenvalues
        .iter()
        .map(|e| e.abs())
        .sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * c(0.5, 0.0)
}

pub(crate) fn check_probabilities(ps: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for p in ps {
        if p < 0.0 || !p.is_finite() {
            return Err(Error::ProbabilityNotNormalized(p));
        }
        total += p;
    }
    if (total - 1.0).abs() > TOL {
        return Err(Error::ProbabilityNotNormalized(total));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::BasisSet;

    fn diag(values: &[f64]) -> DensityMatrix {
        let d = nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)));
        DensityMatrix::new(CMatrix::from_diagonal(&d)).unwrap()
    }

    #[test]
    fn rejects_invalid_matrices() {
        let not_unit = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        );
        assert!(DensityMatrix::new(negative).is_err());
        let skew = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)],
        );
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = reduced_density(&StateVec::bell_pair(), &[0]).unwrap();
        assert!(max_abs(&(rho.entries() - DensityMatrix::maximally_mixed(1).entries())) < 1e-12);
    }

    #[test]
    fn keeping_everything_gives_the_projector() {
        let s = StateVec::from_real(&[0.1, 0.7, 0.2, 0.4]).unwrap();
        let rho = reduced_density(&s, &[0, 1]).unwrap();
        assert!(max_abs(&(rho.entries() - s.projector())) < 1e-12);
    }

    #[test]
    fn product_marginal_recovers_the_factor() {
        let s = StateVec::zero().tensor(&StateVec::plus());
        let rho = reduced_density(&s, &[1]).unwrap();
        assert!(max_abs(&(rho.entries() - StateVec::plus().projector())) < 1e-12);
    }

    #[test]
    fn reduce_matches_pure_state_partial_trace() {
        let s = StateVec::w(3);
        let direct = reduced_density(&s, &[2, 0]).unwrap();
        let via_matrix = DensityMatrix::from_pure(&s).reduce(&[2, 0]).unwrap();
        assert!(max_abs(&(direct.entries() - via_matrix.entries())) < 1e-12);
    }

    #[test]
    fn entropy_values() {
        assert!(von_neumann_entropy(&DensityMatrix::from_pure(&StateVec::plus())) < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(1)) - 1.0).abs() < 1e-12);
        // −(3/4)log₂(3/4) − (1/4)log₂(1/4)
        let expected = -(0.75f64 * 0.75f64.log2()) - 0.25 * 0.25f64.log2();
        assert!((expected - 0.811278).abs() < 1e-6);
        assert!((von_neumann_entropy(&diag(&[0.75, 0.25])) - expected).abs() < 1e-12);
    }

    #[test]
    fn holevo_values() {
        let zero = DensityMatrix::from_pure(&StateVec::zero());
        let one = DensityMatrix::from_pure(&StateVec::one());
        let plus = DensityMatrix::from_pure(&StateVec::plus());
        assert!(holevo_bound(&[(0.5, zero.clone()), (0.5, zero.clone())]).unwrap() < 1e-12);
        let chi = holevo_bound(&[(0.5, zero.clone()), (0.5, one)]).unwrap();
        assert!((chi - 1.0).abs() < 1e-12);
        // average state has eigenvalues (1 ± 1/√2)/2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (l1, l2) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let expected = -l1 * l1.log2() - l2 * l2.log2();
        assert!((expected - 0.600876).abs() < 1e-6);
        let chi = holevo_bound(&[(0.5, zero), (0.5, plus)]).unwrap();
        assert!((chi - expected).abs() < 1e-12);
    }

    #[test]
    fn holevo_errors() {
        let zero = DensityMatrix::from_pure(&StateVec::zero());
        assert!(matches!(
            holevo_bound(&[(0.4, zero.clone()), (0.4, zero.clone())]),
            Err(Error::ProbabilityNotNormalized(_))
        ));
        let pair = DensityMatrix::from_pure(&StateVec::bell_pair());
        assert!(matches!(
            holevo_bound(&[(0.5, zero), (0.5, pair)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn concurrence_of_pure_states() {
        let bell = DensityMatrix::from_pure(&StateVec::bell_pair());
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-9);
        let product = DensityMatrix::from_pure(&StateVec::plus().tensor(&StateVec::one()));
        assert!(concurrence(&product).unwrap() < 1e-9);
        for j in 0..4 {
            let b = DensityMatrix::from_pure(BasisSet::bell().vector(j));
            assert!((concurrence(&b).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn concurrence_wrong_dimension() {
        assert!(matches!(
            concurrence(&DensityMatrix::maximally_mixed(1)),
            Err(Error::WrongDimension { expected: 4, found: 2 })
        ));
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let zero = DensityMatrix::from_pure(&StateVec::zero());
        let one = DensityMatrix::from_pure(&StateVec::one());
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-12);
    }
}
