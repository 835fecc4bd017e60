use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::probe::{controlled_interaction, ProbeOps};
use crate::qlinalg::{BasisSet, CMatrix, StateVec};
use crate::registry::{Holder, Ledger, ParticleId};
use crate::{Error, Result};

/// Basis Eve measures in before resending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    FixedZ,
    FixedX,
    /// Z or X with probability 1/2 each, per qubit.
    RandomZx,
    /// Consecutive groups of `n` travel qubits, jointly, in the code basis.
    CodeBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackModel {
    None,
    InterceptResend { basis: BasisPolicy },
    MeasureAll,
    /// `Σ_α |α⟩⟨α| ⊗ C_α` on each travel qubit and a fresh probe in `|0…0⟩`.
    EntanglingProbe { ops: ProbeOps },
}

impl AttackModel {
    /// Named presets accepted wherever an attack is configured.
    pub fn preset(name: &str) -> Result<Self> {
        let intercept = |basis| Ok(AttackModel::InterceptResend { basis });
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "none" => Ok(AttackModel::None),
            "intercept-z" => intercept(BasisPolicy::FixedZ),
            "intercept-x" => intercept(BasisPolicy::FixedX),
            "intercept-random" | "intercept-resend" => intercept(BasisPolicy::RandomZx),
            "intercept-code" => intercept(BasisPolicy::CodeBasis),
            "measure-all" => Ok(AttackModel::MeasureAll),
            "probe-cnot" => Ok(AttackModel::EntanglingProbe {
                ops: ProbeOps::new(vec![
                    CMatrix::identity(2, 2),
                    crate::qlinalg::pauli_x(),
                ])?,
            }),
            other => Err(Error::ConfigInvalid(format!("unknown attack preset {other:?}"))),
        }
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, AttackModel::None)
    }
}

/// An attack model and the transmission rounds it targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eavesdropper {
    #[serde(flatten)]
    pub model: AttackModel,
    /// Rounds to attack, counted from 0. Absent means every round.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<usize>>,
}

impl Eavesdropper {
    pub fn new(model: AttackModel) -> Self {
        Self {
            model,
            rounds: None,
        }
    }

    pub fn none() -> Self {
        Self::new(AttackModel::None)
    }

    pub fn in_rounds(mut self, rounds: Vec<usize>) -> Self {
        self.rounds = Some(rounds);
        self
    }

    pub fn targets(&self, round: usize) -> bool {
        self.rounds.as_ref().is_none_or(|r| r.contains(&round))
    }

    /// Attacks `ids` if this round is targeted.
    pub fn intercept<R: Rng + ?Sized>(
        &self,
        ledger: &mut Ledger,
        ids: &[ParticleId],
        ctx: &AttackContext<'_>,
        rng: &mut R,
    ) -> Result<Option<EveRecord>> {
        if !self.targets(ctx.round) {
            return Ok(None);
        }
        apply_attack(&self.model, ledger, ids, ctx, rng).map(Some)
    }

    /// Parses a JSON object or a preset name.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            Ok(serde_json::from_str(trimmed)?)
        } else {
            Ok(Self::new(AttackModel::preset(trimmed)?))
        }
    }
}

impl FromStr for Eavesdropper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

pub struct AttackContext<'a> {
    pub round: usize,
    pub code_basis: &'a BasisSet,
}

/// What Eve learned or kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EveRecord {
    /// `(first particle of the measured group, outcome index)`.
    pub outcomes: Vec<(ParticleId, usize)>,
    pub probes: Vec<ParticleId>,
}

pub fn apply_attack<R: Rng + ?Sized>(
    attack: &AttackModel,
    ledger: &mut Ledger,
    ids: &[ParticleId],
    ctx: &AttackContext<'_>,
    rng: &mut R,
) -> Result<EveRecord> {
    for &id in ids {
        if ledger.holder(id) != Some(Holder::InTransit) {
            return Err(if ledger.contains(id) {
                Error::NotInTransit(id)
            } else {
                Error::UnknownParticle(id)
            });
        }
    }
    let mut record = EveRecord::default();
    let z = BasisSet::computational(1);
    let x = BasisSet::hadamard();
    match attack {
        AttackModel::None => {}
        AttackModel::MeasureAll => {
            for &id in ids {
                record.outcomes.push((id, ledger.measure_particles(&[id], &z, rng)?));
            }
        }
        AttackModel::InterceptResend { basis } => match basis {
            BasisPolicy::CodeBasis => {
                let width = ctx.code_basis.qubit_count();
                for group in ids.chunks(width) {
                    if group.len() == width {
                        let outcome = ledger.measure_particles(group, ctx.code_basis, rng)?;
                        record.outcomes.push((group[0], outcome));
                    } else {
                        for &id in group {
                            record.outcomes.push((id, ledger.measure_particles(&[id], &z, rng)?));
                        }
                    }
                }
            }
            policy => {
                for &id in ids {
                    let use_x = match policy {
                        BasisPolicy::FixedX => true,
                        BasisPolicy::RandomZx => rng.random(),
                        _ => false,
                    };
                    let basis = if use_x { &x } else { &z };
                    record.outcomes.push((id, ledger.measure_particles(&[id], basis, rng)?));
                }
            }
        },
        AttackModel::EntanglingProbe { ops } => {
            let interaction = controlled_interaction(ops.as_slice())?;
            let probe_qubits = ops.probe_qubits();
            for &id in ids {
                let probe = ledger
                    .create_block_held_by(StateVec::basis_state(probe_qubits, 0), Holder::Eve);
                let mut register = vec![id];
                register.extend_from_slice(&probe);
                ledger.apply_unitary(&register, &interaction)?;
                record.probes.extend(probe);
            }
        }
    }
    Ok(record)
}
