//! Random-sample surveys of the security diagnostics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{ckw_monogamy, duality_tradeoff, DualityReport, MonogamyReport};
use crate::qlinalg::random::{random_state, random_unitary};
use crate::qlinalg::{pauli_x, CMatrix, StateVec};
use crate::{Error, Result};

/// Slack below which a monogamy sample counts as a violation.
pub const MONOGAMY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualitySurvey {
    pub samples: usize,
    pub probe_qubits: usize,
    /// Largest `|D² + C² − 1|` seen.
    pub max_deviation: f64,
    pub max_linear_sum: f64,
    pub identical_probes: DualityReport,
    pub orthogonal_probes: DualityReport,
}

/// Haar-random probe pairs `(C₀, C₁)` on `probe_qubits` qubits.
pub fn duality_survey(samples: usize, probe_qubits: usize, seed: u64) -> Result<DualitySurvey> {
    if probe_qubits == 0 {
        return Err(Error::ConfigInvalid("probe needs at least one qubit".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0f64;
    let mut max_linear_sum = 0.0f64;
    for _ in 0..samples {
        let ops = [
            random_unitary(probe_qubits, &mut rng),
            random_unitary(probe_qubits, &mut rng),
        ];
        let r = duality_tradeoff(&ops)?;
        max_deviation = max_deviation.max((r.sum_check - 1.0).abs());
        max_linear_sum = max_linear_sum.max(r.linear_sum);
    }
    let dim = 1 << probe_qubits;
    let id = CMatrix::identity(dim, dim);
    let flip = crate::qlinalg::kron(&pauli_x(), &CMatrix::identity(dim / 2, dim / 2));
    Ok(DualitySurvey {
        samples,
        probe_qubits,
        max_deviation,
        max_linear_sum,
        identical_probes: duality_tradeoff(&[id.clone(), id.clone()])?,
        orthogonal_probes: duality_tradeoff(&[id, flip])?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonogamySurvey {
    pub samples: usize,
    pub min_slack: f64,
    pub violations: usize,
    pub ghz: MonogamyReport,
    pub w: MonogamyReport,
}

/// Haar-random pure three-qubit states.
pub fn monogamy_survey(samples: usize, seed: u64) -> Result<MonogamySurvey> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_slack = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let r = ckw_monogamy(&random_state(3, &mut rng))?;
        min_slack = min_slack.min(r.slack);
        if r.slack < -MONOGAMY_TOL {
            violations += 1;
        }
    }
    Ok(MonogamySurvey {
        samples,
        min_slack,
        violations,
        ghz: ckw_monogamy(&StateVec::ghz(3))?,
        w: ckw_monogamy(&StateVec::w(3))?,
    })
}
