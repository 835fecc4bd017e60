//! Entangling probes and the which-way/coherence trade-off.

use serde::{Deserialize, Serialize};

use crate::qlinalg::{
    c, log2_exact, reduced_density, trace_distance, unitarity_deviation, CMatrix, CVector,
    DensityMatrix, StateVec, C64, TOL,
};
use crate::{Error, Result};

type MatrixDoc = Vec<Vec<[f64; 2]>>;

/// Probe unitaries `C_α`, one per basis state of the attacked qubit.
/// All act on the same probe register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MatrixDoc>", into = "Vec<MatrixDoc>")]
pub struct ProbeOps(Vec<CMatrix>);

impl ProbeOps {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        check_probe_ops(&ops)?;
        Ok(Self(ops))
    }

    pub fn as_slice(&self) -> &[CMatrix] {
        &self.0
    }

    pub fn probe_qubits(&self) -> usize {
        self.0[0].nrows().trailing_zeros() as usize
    }
}

impl TryFrom<Vec<MatrixDoc>> for ProbeOps {
    type Error = Error;

    fn try_from(doc: Vec<MatrixDoc>) -> Result<Self> {
        let ops = doc
            .into_iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
                    });
                }
                Ok(CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }
}

impl From<ProbeOps> for Vec<MatrixDoc> {
    fn from(ops: ProbeOps) -> Self {
        ops.0
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect()
            })
            .collect()
    }
}

fn check_probe_ops(ops: &[CMatrix]) -> Result<usize> {
    let Some(first) = ops.first() else {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    };
    let dim = first.nrows();
    log2_exact(dim)?;
    for (index, op) in ops.iter().enumerate() {
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.nrows().max(op.ncols()),
            });
        }
        let deviation = unitarity_deviation(op);
        if deviation > TOL {
            return Err(Error::NonUnitaryProbe { index, deviation });
        }
    }
    Ok(dim)
}

/// `Σ_α |α⟩⟨α| ⊗ C_α`, system qubits first.
pub fn controlled_interaction(ops: &[CMatrix]) -> Result<CMatrix> {
    let d = check_probe_ops(ops)?;
    log2_exact(ops.len())?;
    let mut u = CMatrix::zeros(ops.len() * d, ops.len() * d);
    for (alpha, op) in ops.iter().enumerate() {
        u.view_mut((alpha * d, alpha * d), (d, d)).copy_from(op);
    }
    Ok(u)
}

/// `|α⟩|0_E⟩ ↦ |α⟩ C_α|0_E⟩`, extended linearly over `state`.
/// The probe qubits follow the system qubits in the result.
pub fn probe_interaction(state: &StateVec, ops: &[CMatrix]) -> Result<StateVec> {
    let d = check_probe_ops(ops)?;
    if ops.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: ops.len(),
        });
    }
    let amps = state.amplitudes();
    let joint = CVector::from_fn(state.dim() * d, |k, _| amps[k / d] * ops[k / d][(k % d, 0)]);
    StateVec::new(joint)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Trace distance between Eve's two conditional probe states.
    pub distinguishability: f64,
    /// Twice the modulus of Bob's off-diagonal element.
    pub coherence: f64,
    /// `D² + C²`.
    pub sum_check: f64,
    /// `D + C`.
    pub linear_sum: f64,
}

impl DualityReport {
    fn new(d: f64, c: f64) -> Self {
        Self {
            distinguishability: d,
            coherence: c,
            sum_check: d * d + c * c,
            linear_sum: d + c,
        }
    }
}

/// Which-way record versus coherence for a probe acting on a `|+⟩` qubit
/// with the probe starting in `|0_E⟩`.
pub fn duality_tradeoff(ops: &[CMatrix]) -> Result<DualityReport> {
    if ops.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ops.len(),
        });
    }
    let plus = StateVec::plus();
    let joint = probe_interaction(&plus, ops)?;
    let bob = reduced_density(&joint, &[0])?;
    let fresh = StateVec::basis_state(joint.qubit_count() - 1, 0);
    let beta0 = DensityMatrix::from_pure(&fresh.apply(&ops[0])?);
    let beta1 = DensityMatrix::from_pure(&fresh.apply(&ops[1])?);
    let d = trace_distance(&beta0, &beta1)?;
    // 2|ρ₀₁| for |+⟩, written as |ρ₀₁| / |ψ₀ψ₁| so the limits come out exact
    let a = plus.amplitudes();
    let coherence = (bob.entries()[(0, 1)].norm() / (a[0].norm() * a[1].norm())).min(1.0);
    Ok(DualityReport::new(d, coherence))
}

/// As [`duality_tradeoff`] with the probe starting in the mixed state
/// `sigma`, e.g. half of a pair entangled with a register Eve keeps.
pub fn duality_tradeoff_mixed(ops: &[CMatrix], sigma: &DensityMatrix) -> Result<DualityReport> {
    let d = check_probe_ops(ops)?;
    if ops.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ops.len(),
        });
    }
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.dim(),
        });
    }
    let s = sigma.entries();
    let rho0 = DensityMatrix::new(&ops[0] * s * ops[0].adjoint())?;
    let rho1 = DensityMatrix::new(&ops[1] * s * ops[1].adjoint())?;
    let distance = trace_distance(&rho0, &rho1)?;
    let overlap: C64 = (&ops[0] * s * ops[1].adjoint()).trace();
    Ok(DualityReport::new(distance, overlap.norm().min(1.0)))
}
