//! Decoy preparation, placement and the two eavesdropping checks.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Variant;
use crate::qlinalg::random::random_permutation;
use crate::qlinalg::{BasisSet, Permutation, StateVec};
use crate::registry::{permute_transport, Ledger, ParticleId, TransportSequence};
use crate::{Error, Result};

/// One of the four BB84 decoy states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MubState {
    Zero,
    One,
    Plus,
    Minus,
}

impl MubState {
    pub const ALL: [MubState; 4] = [MubState::Zero, MubState::One, MubState::Plus, MubState::Minus];

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..4)]
    }

    pub fn state(self) -> StateVec {
        match self {
            MubState::Zero => StateVec::zero(),
            MubState::One => StateVec::one(),
            MubState::Plus => StateVec::plus(),
            MubState::Minus => StateVec::minus(),
        }
    }

    pub fn in_x_basis(self) -> bool {
        matches!(self, MubState::Plus | MubState::Minus)
    }

    /// Outcome index expected when measured in the preparation basis.
    pub fn bit(self) -> usize {
        match self {
            MubState::Zero | MubState::Plus => 0,
            MubState::One | MubState::Minus => 1,
        }
    }

    pub fn preparation_basis(self) -> BasisSet {
        if self.in_x_basis() {
            BasisSet::hadamard()
        } else {
            BasisSet::computational(1)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyKind {
    MubSingles,
    BellPairs,
}

/// How many decoy qubits to add, and of which kind.
///
/// With `BellPairs`, an odd count is filled with `count / 2` pairs plus
/// one BB84 single; use [`DecoySpec::new`] to reject odd counts instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoySpec {
    kind: DecoyKind,
    count: usize,
}

impl DecoySpec {
    pub fn new(kind: DecoyKind, count: usize) -> Result<Self> {
        if kind == DecoyKind::BellPairs && count % 2 == 1 {
            return Err(Error::OddDecoyCount(count));
        }
        Ok(Self { kind, count })
    }

    pub fn for_variant(variant: Variant, count: usize) -> Self {
        let kind = if variant.uses_bell_decoys() {
            DecoyKind::BellPairs
        } else {
            DecoyKind::MubSingles
        };
        Self { kind, count }
    }

    pub fn kind(&self) -> DecoyKind {
        self.kind
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn pairs(&self) -> usize {
        match self.kind {
            DecoyKind::MubSingles => 0,
            DecoyKind::BellPairs => self.count / 2,
        }
    }

    pub fn singles(&self) -> usize {
        self.count - 2 * self.pairs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decoy {
    Single { id: ParticleId, prep: MubState },
    Pair { ids: [ParticleId; 2] },
}

impl Decoy {
    pub fn particles(&self) -> Vec<ParticleId> {
        match self {
            Decoy::Single { id, .. } => vec![*id],
            Decoy::Pair { ids } => ids.to_vec(),
        }
    }
}

/// A message sequence mixed with decoys, as sent.
#[derive(Clone, Debug)]
pub struct DressedSequence {
    /// Send order.
    pub transport: TransportSequence,
    /// Maps positions in `message ++ decoys` to send positions. Alice's secret.
    pub hidden: Permutation,
    /// Send positions of the decoys, ascending.
    pub decoy_positions: Vec<usize>,
    pub decoys: Vec<Decoy>,
}

impl DressedSequence {
    /// Recovers the original message order from the send order.
    pub fn message_order(&self, message_len: usize) -> Vec<ParticleId> {
        let sent = self.transport.as_slice();
        (0..message_len).map(|i| sent[self.hidden.apply(i)]).collect()
    }
}

/// Prepares decoys in Alice's hands. Pair members are adjacent in the
/// returned id list.
pub fn prepare_decoys<R: Rng + ?Sized>(
    spec: &DecoySpec,
    ledger: &mut Ledger,
    rng: &mut R,
) -> (Vec<Decoy>, Vec<ParticleId>) {
    let mut decoys = Vec::new();
    let mut ids = Vec::with_capacity(spec.count());
    for _ in 0..spec.pairs() {
        let pair = ledger.create_block(StateVec::bell_pair());
        ids.extend_from_slice(&pair);
        decoys.push(Decoy::Pair {
            ids: [pair[0], pair[1]],
        });
    }
    for _ in 0..spec.singles() {
        let prep = MubState::random(rng);
        let id = ledger.create_block(prep.state())[0];
        ids.push(id);
        decoys.push(Decoy::Single { id, prep });
    }
    (decoys, ids)
}

/// Appends decoys to `message` and scrambles the whole sequence with a
/// uniformly random permutation.
pub fn dress_with_decoys<R: Rng + ?Sized>(
    message: &TransportSequence,
    spec: &DecoySpec,
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<DressedSequence> {
    check_decoy_count(message, spec)?;
    let (decoys, ids) = prepare_decoys(spec, ledger, rng);
    let order = random_permutation(message.len() + ids.len(), rng);
    assemble(message, decoys, ids, order)
}

/// As [`dress_with_decoys`] with a caller-chosen permutation.
pub fn dress_with_order<R: Rng + ?Sized>(
    message: &TransportSequence,
    spec: &DecoySpec,
    ledger: &mut Ledger,
    order: Permutation,
    rng: &mut R,
) -> Result<DressedSequence> {
    check_decoy_count(message, spec)?;
    if order.len() != message.len() + spec.count() {
        return Err(Error::LengthMismatch {
            expected: message.len() + spec.count(),
            found: order.len(),
        });
    }
    let (decoys, ids) = prepare_decoys(spec, ledger, rng);
    assemble(message, decoys, ids, order)
}

/// Inserts decoys at uniformly random positions while keeping the message
/// qubits in their original relative order.
pub fn interleave_decoys<R: Rng + ?Sized>(
    message: &TransportSequence,
    spec: &DecoySpec,
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<DressedSequence> {
    check_decoy_count(message, spec)?;
    let (decoys, ids) = prepare_decoys(spec, ledger, rng);
    let order = random_interleaving(message.len(), ids.len(), rng);
    assemble(message, decoys, ids, order)
}

/// Permutation of `message ++ decoys` that picks random send slots for the
/// decoys and fills the rest with the message in order. Decoys keep their
/// relative order too, so Bell partners stay adjacent in the list.
pub fn random_interleaving<R: Rng + ?Sized>(
    message_len: usize,
    decoy_len: usize,
    rng: &mut R,
) -> Permutation {
    let total = message_len + decoy_len;
    let mut is_decoy = vec![false; total];
    for slot in sample(rng, total, decoy_len) {
        is_decoy[slot] = true;
    }
    let message_slots = (0..total).filter(|&s| !is_decoy[s]);
    let decoy_slots = (0..total).filter(|&s| is_decoy[s]);
    Permutation::new(message_slots.chain(decoy_slots).collect()).expect("slots partition 0..total")
}

fn check_decoy_count(message: &TransportSequence, spec: &DecoySpec) -> Result<()> {
    if spec.count() != message.len() {
        return Err(Error::LengthMismatch {
            expected: message.len(),
            found: spec.count(),
        });
    }
    Ok(())
}

fn assemble(
    message: &TransportSequence,
    decoys: Vec<Decoy>,
    decoy_ids: Vec<ParticleId>,
    order: Permutation,
) -> Result<DressedSequence> {
    let offset = message.len();
    let mut all = message.as_slice().to_vec();
    all.extend_from_slice(&decoy_ids);
    let transport = permute_transport(&TransportSequence::new(all)?, &order)?;
    let mut decoy_positions: Vec<usize> =
        (0..decoy_ids.len()).map(|k| order.apply(offset + k)).collect();
    decoy_positions.sort_unstable();
    Ok(DressedSequence {
        transport,
        hidden: order,
        decoy_positions,
        decoys,
    })
}

/// Fraction of BB84 decoys whose outcome, in their preparation basis,
/// disagrees with the prepared value.
pub fn bb84_decoy_check(preps: &[MubState], outcomes: &[usize]) -> Result<f64> {
    if preps.len() != outcomes.len() {
        return Err(Error::LengthMismatch {
            expected: preps.len(),
            found: outcomes.len(),
        });
    }
    let errors = preps
        .iter()
        .zip(outcomes)
        .filter(|(p, &o)| p.bit() != o)
        .count();
    Ok(ratio(errors, preps.len()))
}

/// Fraction of Bell decoy pairs not found in the decoy state (Bell-basis
/// outcome 0). `decoy_ids` lists the pairs flattened, partners adjacent;
/// `outcomes` has one entry per pair.
pub fn bell_decoy_check(decoy_ids: &[ParticleId], outcomes: &[usize]) -> Result<f64> {
    if decoy_ids.len() % 2 == 1 {
        return Err(Error::UnpairedDecoy(decoy_ids[decoy_ids.len() - 1]));
    }
    let pairs = decoy_ids.len() / 2;
    if outcomes.len() != pairs {
        return Err(Error::LengthMismatch {
            expected: pairs,
            found: outcomes.len(),
        });
    }
    let errors = outcomes.iter().filter(|&&o| o != 0).count();
    Ok(ratio(errors, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Abort,
}

/// Accept iff `error_rate ≤ delta`. Nothing checked means nothing
/// certified, so an empty check aborts.
pub fn threshold_decide(error_rate: f64, checked: usize, delta: f64) -> Decision {
    if checked > 0 && error_rate <= delta {
        Decision::Accept
    } else {
        Decision::Abort
    }
}

/// Error count over checked decoy units (singles and pairs each count once).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecoyTally {
    pub checked: usize,
    pub errors: usize,
}

impl DecoyTally {
    pub fn error_rate(&self) -> f64 {
        ratio(self.errors, self.checked)
    }
}

/// Bob's side of the check: singles in their preparation basis (announced
/// by Alice after the acknowledgment), pairs in the Bell basis.
pub fn measure_decoys<R: Rng + ?Sized>(
    ledger: &mut Ledger,
    decoys: &[Decoy],
    rng: &mut R,
) -> Result<DecoyTally> {
    let mut preps = Vec::new();
    let mut single_outcomes = Vec::new();
    let mut pair_ids = Vec::new();
    let mut pair_outcomes = Vec::new();
    let bell = BasisSet::bell();
    for decoy in decoys {
        match decoy {
            Decoy::Single { id, prep } => {
                let outcome = ledger.measure_particles(&[*id], &prep.preparation_basis(), rng)?;
                preps.push(*prep);
                single_outcomes.push(outcome);
            }
            Decoy::Pair { ids } => {
                pair_outcomes.push(ledger.measure_particles(ids, &bell, rng)?);
                pair_ids.extend_from_slice(ids);
            }
        }
    }
    let single_rate = bb84_decoy_check(&preps, &single_outcomes)?;
    let pair_rate = bell_decoy_check(&pair_ids, &pair_outcomes)?;
    Ok(DecoyTally {
        checked: preps.len() + pair_outcomes.len(),
        errors: (single_rate * preps.len() as f64).round() as usize
            + (pair_rate * pair_outcomes.len() as f64).round() as usize,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn message(ledger: &mut Ledger, len: usize) -> TransportSequence {
        TransportSequence::new(
            (0..len)
                .flat_map(|_| ledger.create_block(StateVec::zero()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mub_singles_double_the_sequence() {
        let mut ledger = Ledger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let msg = message(&mut ledger, 4);
        let spec = DecoySpec::new(DecoyKind::MubSingles, 4).unwrap();
        let d = dress_with_decoys(&msg, &spec, &mut ledger, &mut rng).unwrap();
        assert_eq!(d.transport.len(), 8);
        assert_eq!(d.decoy_positions.len(), 4);
        let sent = d.transport.as_slice();
        for (k, decoy) in d.decoys.iter().enumerate() {
            let Decoy::Single { id, .. } = decoy else { panic!("expected single") };
            assert_eq!(sent[d.hidden.apply(4 + k)], *id);
            assert!(d.decoy_positions.contains(&d.hidden.apply(4 + k)));
        }
        assert_eq!(d.message_order(4), msg.as_slice());
    }

    #[test]
    fn bell_pairs_for_four_message_qubits() {
        let mut ledger = Ledger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let msg = message(&mut ledger, 4);
        let spec = DecoySpec::new(DecoyKind::BellPairs, 4).unwrap();
        let d = dress_with_decoys(&msg, &spec, &mut ledger, &mut rng).unwrap();
        assert_eq!(d.transport.len(), 8);
        assert_eq!(d.decoys.len(), 2);
        assert!(d.decoys.iter().all(|x| matches!(x, Decoy::Pair { .. })));
    }

    #[test]
    fn odd_bell_count_is_padded_or_rejected() {
        assert!(matches!(
            DecoySpec::new(DecoyKind::BellPairs, 5),
            Err(Error::OddDecoyCount(5))
        ));
        let spec = DecoySpec::for_variant(Variant::DsqcGv, 5);
        assert_eq!((spec.pairs(), spec.singles()), (2, 1));
        let spec = DecoySpec::for_variant(Variant::Dsqc, 5);
        assert_eq!((spec.pairs(), spec.singles()), (0, 5));
    }

    #[test]
    fn identity_order_puts_decoys_last() {
        let mut ledger = Ledger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let msg = message(&mut ledger, 3);
        let spec = DecoySpec::new(DecoyKind::MubSingles, 3).unwrap();
        let d = dress_with_order(&msg, &spec, &mut ledger, Permutation::identity(6), &mut rng)
            .unwrap();
        assert_eq!(d.decoy_positions, vec![3, 4, 5]);
        assert_eq!(&d.transport.as_slice()[..3], msg.as_slice());
    }

    #[test]
    fn interleaving_keeps_message_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let p = random_interleaving(5, 5, &mut rng);
            let msg: Vec<usize> = (0..5).map(|i| p.apply(i)).collect();
            assert!(msg.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn decoy_count_must_match() {
        let mut ledger = Ledger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let msg = message(&mut ledger, 3);
        let spec = DecoySpec::new(DecoyKind::MubSingles, 2).unwrap();
        assert!(dress_with_decoys(&msg, &spec, &mut ledger, &mut rng).is_err());
    }

    #[test]
    fn undisturbed_decoys_have_no_errors() {
        let mut ledger = Ledger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for kind in [DecoyKind::MubSingles, DecoyKind::BellPairs] {
            let spec = DecoySpec::new(kind, 200).unwrap();
            let (decoys, _) = prepare_decoys(&spec, &mut ledger, &mut rng);
            let tally = measure_decoys(&mut ledger, &decoys, &mut rng).unwrap();
            assert_eq!(tally.errors, 0);
        }
    }

    #[test]
    fn bb84_check_counts_mismatches() {
        let preps = [MubState::Zero, MubState::Minus, MubState::Plus, MubState::One];
        assert_eq!(bb84_decoy_check(&preps, &[0, 1, 0, 1]).unwrap(), 0.0);
        assert_eq!(bb84_decoy_check(&preps, &[1, 1, 1, 1]).unwrap(), 0.5);
        assert!(bb84_decoy_check(&preps, &[0]).is_err());
    }

    #[test]
    fn bell_check_errors() {
        let mut ledger = Ledger::new();
        let ids = ledger.create_block(StateVec::bell_pair());
        let lone = ledger.create_block(StateVec::zero());
        assert_eq!(bell_decoy_check(&ids, &[0]).unwrap(), 0.0);
        assert_eq!(bell_decoy_check(&ids, &[3]).unwrap(), 1.0);
        let odd = [ids[0], ids[1], lone[0]];
        assert!(matches!(
            bell_decoy_check(&odd, &[0]),
            Err(Error::UnpairedDecoy(_))
        ));
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        assert_eq!(threshold_decide(0.0, 10, 0.0), Decision::Accept);
        assert_eq!(threshold_decide(0.25, 10, 0.05), Decision::Abort);
        assert_eq!(threshold_decide(0.05, 20, 0.05), Decision::Accept);
        assert_eq!(threshold_decide(0.0, 0, 0.0), Decision::Abort);
    }
}
