//! Bookkeeping for every particle in flight.
//!
//! Particles live in blocks that carry a joint pure state. Blocks that are
//! never touched jointly stay separate, so a run with thousands of message
//! and decoy qubits never builds an exponentially large vector. Joint
//! operations merge the blocks involved; measurements re-split them into
//! product factors when the post-measurement state allows it.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qlinalg::{
    factorize, measure_subset, reduced_density, BasisSet, CMatrix, DensityMatrix, Permutation,
    StateVec,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticleId(u64);

impl ParticleId {
    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Display for ParticleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holder {
    Alice,
    InTransit,
    Bob,
    Eve,
}

#[derive(Clone, Debug)]
pub struct Block {
    particles: Vec<ParticleId>,
    state: StateVec,
}

impl Block {
    pub fn particles(&self) -> &[ParticleId] {
        &self.particles
    }

    pub fn state(&self) -> &StateVec {
        &self.state
    }
}

type BlockId = u64;

/// Registry of particles, their blocks, and who currently holds them.
#[derive(Clone, Debug, Default)]
pub struct Ledger {
    blocks: BTreeMap<BlockId, Block>,
    location: BTreeMap<ParticleId, BlockId>,
    owner: BTreeMap<ParticleId, Holder>,
    next_particle: u64,
    next_block: BlockId,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a block in `state`, held by Alice. Ids are returned in qubit order.
    pub fn create_block(&mut self, state: StateVec) -> Vec<ParticleId> {
        self.create_block_held_by(state, Holder::Alice)
    }

    pub fn create_block_held_by(&mut self, state: StateVec, holder: Holder) -> Vec<ParticleId> {
        let ids: Vec<ParticleId> = (0..state.qubit_count())
            .map(|_| {
                let id = ParticleId(self.next_particle);
                self.next_particle += 1;
                id
            })
            .collect();
        let block = self.insert_block(ids.clone(), state);
        for &id in &ids {
            self.owner.insert(id, holder);
            self.location.insert(id, block);
        }
        ids
    }

    pub fn transfer(&mut self, ids: &[ParticleId], holder: Holder) -> Result<()> {
        self.check_known(ids)?;
        for id in ids {
            self.owner.insert(*id, holder);
        }
        Ok(())
    }

    pub fn holder(&self, id: ParticleId) -> Option<Holder> {
        self.owner.get(&id).copied()
    }

    pub fn contains(&self, id: ParticleId) -> bool {
        self.location.contains_key(&id)
    }

    pub fn particle_count(&self) -> usize {
        self.location.len()
    }

    /// All particle ids, ascending.
    pub fn particles(&self) -> impl Iterator<Item = ParticleId> + '_ {
        self.location.keys().copied()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    pub fn block_of(&self, id: ParticleId) -> Result<&Block> {
        let b = self.location.get(&id).ok_or(Error::UnknownParticle(id))?;
        Ok(&self.blocks[b])
    }

    /// Reduced state of `ids` (in that order), leaving the ledger untouched.
    pub fn reduced_state(&self, ids: &[ParticleId]) -> Result<DensityMatrix> {
        self.check_known(ids)?;
        let (particles, state) = self.joint_view(ids);
        let positions = positions_of(&particles, ids);
        reduced_density(&state, &positions)
    }

    /// Applies `op` to `ids` (in that order) as one register, merging the
    /// blocks involved.
    pub fn apply_unitary(&mut self, ids: &[ParticleId], op: &CMatrix) -> Result<()> {
        self.check_known(ids)?;
        let (block, positions) = self.merge(ids)?;
        let entry = self.blocks.get_mut(&block).expect("merged block exists");
        entry.state = entry.state.apply_on(&positions, op)?;
        Ok(())
    }

    /// Measures `ids` jointly in `basis` and returns the outcome index.
    ///
    /// The blocks holding `ids` are merged for the measurement; afterwards
    /// the measured register and the remainder are each split into their
    /// product factors.
    pub fn measure_particles<R: Rng + ?Sized>(
        &mut self,
        ids: &[ParticleId],
        basis: &BasisSet,
        rng: &mut R,
    ) -> Result<usize> {
        self.check_known(ids)?;
        let (block_id, positions) = self.merge(ids)?;
        let block = self.blocks.remove(&block_id).expect("merged block exists");
        let m = match measure_subset(&block.state, &positions, basis, rng) {
            Ok(m) => m,
            Err(e) => {
                self.blocks.insert(block_id, block);
                return Err(e);
            }
        };
        let measured = basis.vector(m.outcome).clone();
        self.insert_factored(ids.to_vec(), &measured);
        if let Some(residual) = m.residual {
            let rest: Vec<ParticleId> = block
                .particles
                .iter()
                .copied()
                .filter(|p| !ids.contains(p))
                .collect();
            self.insert_factored(rest, &residual);
        }
        Ok(m.outcome)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            blocks: self
                .blocks
                .values()
                .map(|b| BlockSnapshot {
                    particles: b.particles.clone(),
                    amplitudes: b.state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect(),
            ownership: self.owner.clone(),
        }
    }

    fn check_known(&self, ids: &[ParticleId]) -> Result<()> {
        for (i, id) in ids.iter().enumerate() {
            if !self.location.contains_key(id) {
                return Err(Error::UnknownParticle(*id));
            }
            if ids[..i].contains(id) {
                return Err(Error::InvalidPosition {
                    position: i,
                    qubits: ids.len(),
                });
            }
        }
        Ok(())
    }

    fn insert_block(&mut self, particles: Vec<ParticleId>, state: StateVec) -> BlockId {
        let id = self.next_block;
        self.next_block += 1;
        for p in &particles {
            self.location.insert(*p, id);
        }
        self.blocks.insert(id, Block { particles, state });
        id
    }

    fn insert_factored(&mut self, particles: Vec<ParticleId>, state: &StateVec) {
        for factor in factorize(state) {
            let ps = factor.qubits.iter().map(|&q| particles[q]).collect();
            self.insert_block(ps, factor.state);
        }
    }

    /// Distinct blocks touched by `ids`, in order of first appearance.
    fn blocks_touched(&self, ids: &[ParticleId]) -> Vec<BlockId> {
        let mut out: Vec<BlockId> = Vec::new();
        for id in ids {
            let b = self.location[id];
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out
    }

    fn joint_view(&self, ids: &[ParticleId]) -> (Vec<ParticleId>, StateVec) {
        let touched = self.blocks_touched(ids);
        let mut particles = Vec::new();
        let mut state: Option<StateVec> = None;
        for b in touched {
            let block = &self.blocks[&b];
            particles.extend_from_slice(&block.particles);
            state = Some(match state {
                None => block.state.clone(),
                Some(s) => s.tensor(&block.state),
            });
        }
        (particles, state.expect("ids is nonempty"))
    }

    /// Merges every block touched by `ids` into one; returns it and the
    /// positions of `ids` inside it.
    fn merge(&mut self, ids: &[ParticleId]) -> Result<(BlockId, Vec<usize>)> {
        if ids.is_empty() {
            return Err(Error::EmptySubset);
        }
        let touched = self.blocks_touched(ids);
        if touched.len() == 1 {
            let b = touched[0];
            return Ok((b, positions_of(&self.blocks[&b].particles, ids)));
        }
        let (particles, state) = self.joint_view(ids);
        for b in &touched {
            self.blocks.remove(b);
        }
        let positions = positions_of(&particles, ids);
        Ok((self.insert_block(particles, state), positions))
    }
}

fn positions_of(particles: &[ParticleId], ids: &[ParticleId]) -> Vec<usize> {
    ids.iter()
        .map(|id| {
            particles
                .iter()
                .position(|p| p == id)
                .expect("id belongs to the merged block")
        })
        .collect()
}

/// Debug dump of a ledger; not a stable format.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerSnapshot {
    pub blocks: Vec<BlockSnapshot>,
    pub ownership: BTreeMap<ParticleId, Holder>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSnapshot {
    pub particles: Vec<ParticleId>,
    pub amplitudes: Vec<[f64; 2]>,
}

/// Physical send order of particles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportSequence(Vec<ParticleId>);

impl TransportSequence {
    pub fn new(ids: Vec<ParticleId>) -> Result<Self> {
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(Error::InvalidPermutation(format!("{id} appears twice")));
            }
        }
        Ok(Self(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[ParticleId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ParticleId> {
        self.0
    }
}

/// Reorders a send sequence so that `output[perm(i)] = input[i]`. Quantum
/// states are not touched.
pub fn permute_transport(seq: &TransportSequence, perm: &Permutation) -> Result<TransportSequence> {
    if perm.len() != seq.len() {
        return Err(Error::LengthMismatch {
            expected: seq.len(),
            found: perm.len(),
        });
    }
    let mut out = seq.0.clone();
    for (i, id) in seq.0.iter().enumerate() {
        out[perm.apply(i)] = *id;
    }
    Ok(TransportSequence(out))
}
