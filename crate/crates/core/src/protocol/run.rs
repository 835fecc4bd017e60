//! Alice and Bob, step by step.

use rand::Rng;

use super::decoy::{dress_with_decoys, interleave_decoys, measure_decoys, threshold_decide};
use super::decoy::{Decision, Decoy, DecoySpec, DecoyTally, DressedSequence};
use super::report::{Party, Purpose, RunReport, Transcript};
use super::{decode_block, Bits, ProtocolConfig, Variant};
use crate::adversary::{AttackContext, Eavesdropper};
use crate::registry::{Holder, Ledger, ParticleId, TransportSequence};
use crate::{Error, Result};

/// Runs whichever protocol `config.variant()` names.
pub fn run<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    message: &Bits,
    eve: &Eavesdropper,
    rng: &mut R,
) -> Result<RunReport> {
    if config.variant().is_multi_round() {
        run_qsdc(config, message, eve, rng)
    } else {
        run_dsqc(config, message, eve, rng)
    }
}

/// One-shot protocol: all message qubits travel together, scrambled among
/// as many decoys, and Bob learns the true order only after the check.
pub fn run_dsqc<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    message: &Bits,
    eve: &Eavesdropper,
    rng: &mut R,
) -> Result<RunReport> {
    require_variant(config, &[Variant::Dsqc, Variant::DsqcGv])?;
    let mut ledger = Ledger::new();
    let blocks = prepare_blocks(config, message, &mut ledger)?;
    let len = config.message_len();
    let travel = TransportSequence::new(blocks.concat())?;
    let spec = DecoySpec::for_variant(config.variant(), len);
    let dressed = dress_with_decoys(&travel, &spec, &mut ledger, rng)?;

    let mut transcript = Transcript::new();
    transmit(&mut ledger, &dressed, eve, config, 0, rng)?;
    let tally = check_round(&mut ledger, &dressed, &mut transcript, rng)?;
    let q = 2 * len as u64;

    if threshold_decide(tally.error_rate(), tally.checked, config.delta()) == Decision::Abort {
        return Ok(aborted(tally, 1, q, transcript));
    }

    transcript.record(Party::Alice, Purpose::OrderDisclosure, len);
    let order = dressed.message_order(len);
    let decoded = decode_all(config, &order, &mut ledger, rng)?;
    Ok(completed(decoded, tally, 1, q, transcript))
}

/// Multi-round protocol: round `s` carries the `s`-th qubit of every block
/// with `N` interleaved decoys. An abort stops before the next round leaves
/// Alice.
pub fn run_qsdc<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    message: &Bits,
    eve: &Eavesdropper,
    rng: &mut R,
) -> Result<RunReport> {
    require_variant(config, &[Variant::Qsdc, Variant::QsdcGv])?;
    let mut ledger = Ledger::new();
    let blocks = prepare_blocks(config, message, &mut ledger)?;
    let n = config.n();
    let copies = config.copies();

    let mut transcript = Transcript::new();
    let mut tally = DecoyTally::default();
    let mut q = 0u64;
    let mut received = vec![Vec::with_capacity(n); copies];
    for s in 0..n {
        let travel = TransportSequence::new(blocks.iter().map(|b| b[s]).collect())?;
        let spec = DecoySpec::for_variant(config.variant(), copies);
        let dressed = interleave_decoys(&travel, &spec, &mut ledger, rng)?;
        transmit(&mut ledger, &dressed, eve, config, s, rng)?;
        q += 2 * copies as u64;

        let round = check_round(&mut ledger, &dressed, &mut transcript, rng)?;
        tally.checked += round.checked;
        tally.errors += round.errors;
        if threshold_decide(round.error_rate(), round.checked, config.delta()) == Decision::Abort {
            return Ok(aborted(tally, s + 1, q, transcript));
        }
        for (l, id) in dressed.message_order(copies).into_iter().enumerate() {
            received[l].push(id);
        }
    }
    let decoded = decode_all(config, &received.concat(), &mut ledger, rng)?;
    Ok(completed(decoded, tally, n, q, transcript))
}

fn require_variant(config: &ProtocolConfig, allowed: &[Variant]) -> Result<()> {
    if allowed.contains(&config.variant()) {
        Ok(())
    } else {
        Err(Error::ConfigInvalid(format!(
            "variant {} cannot run under this protocol",
            config.variant()
        )))
    }
}

/// Prepares `N` copies of the initial state and encodes one block of
/// `message` on each.
fn prepare_blocks(
    config: &ProtocolConfig,
    message: &Bits,
    ledger: &mut Ledger,
) -> Result<Vec<Vec<ParticleId>>> {
    if message.len() != config.message_len() {
        return Err(Error::LengthMismatch {
            expected: config.message_len(),
            found: message.len(),
        });
    }
    message
        .chunks(config.n())
        .map(|word| {
            let ids = ledger.create_block(config.initial_state().clone());
            ledger.apply_unitary(&ids, config.family().op(word.value()))?;
            Ok(ids)
        })
        .collect()
}

fn transmit<R: Rng + ?Sized>(
    ledger: &mut Ledger,
    dressed: &DressedSequence,
    eve: &Eavesdropper,
    config: &ProtocolConfig,
    round: usize,
    rng: &mut R,
) -> Result<()> {
    let sent = dressed.transport.as_slice();
    ledger.transfer(sent, Holder::InTransit)?;
    let ctx = AttackContext {
        round,
        code_basis: config.basis(),
    };
    eve.intercept(ledger, sent, &ctx, rng)?;
    ledger.transfer(sent, Holder::Bob)
}

/// Acknowledgment, decoy disclosure and the check itself.
fn check_round<R: Rng + ?Sized>(
    ledger: &mut Ledger,
    dressed: &DressedSequence,
    transcript: &mut Transcript,
    rng: &mut R,
) -> Result<DecoyTally> {
    transcript.record(Party::Bob, Purpose::Acknowledgment, 1);
    let width = address_bits(dressed.transport.len());
    let singles = dressed
        .decoys
        .iter()
        .filter(|d| matches!(d, Decoy::Single { .. }))
        .count();
    // positions, plus one basis bit per BB84 decoy
    transcript.record(
        Party::Alice,
        Purpose::DecoyCoordinates,
        dressed.decoy_positions.len() * width + singles,
    );
    let tally = measure_decoys(ledger, &dressed.decoys, rng)?;
    let pairs = dressed.decoys.len() - singles;
    transcript.record(Party::Bob, Purpose::EavesdropCheck, singles + 2 * pairs);
    Ok(tally)
}

fn address_bits(len: usize) -> usize {
    (usize::BITS - len.saturating_sub(1).leading_zeros()) as usize
}

/// Bob measures each block, given in message order, in the code basis.
fn decode_all<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    order: &[ParticleId],
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<Bits> {
    let words = order
        .chunks(config.n())
        .map(|block| {
            let outcome = ledger.measure_particles(block, config.basis(), rng)?;
            decode_block(outcome, config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bits::concat(words))
}

fn aborted(tally: DecoyTally, rounds: usize, q: u64, transcript: Transcript) -> RunReport {
    RunReport {
        decoded_bits: None,
        aborted: true,
        decoy_error_rate: tally.error_rate(),
        rounds,
        c: 0,
        q,
        b: 0,
        eve_leakage_bits: None,
        decoys_checked: tally.checked,
        decoy_errors: tally.errors,
        transcript,
    }
}

fn completed(
    decoded: Bits,
    tally: DecoyTally,
    rounds: usize,
    q: u64,
    transcript: Transcript,
) -> RunReport {
    RunReport {
        c: decoded.len() as u64,
        b: transcript.decoding_bits() as u64,
        decoded_bits: Some(decoded),
        aborted: false,
        decoy_error_rate: tally.error_rate(),
        rounds,
        q,
        eve_leakage_bits: None,
        decoys_checked: tally.checked,
        decoy_errors: tally.errors,
        transcript,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{AttackModel, BasisPolicy};
    use crate::qlinalg::BasisSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(variant: Variant, basis: BasisSet, copies: usize) -> ProtocolConfig {
        ProtocolConfig::new(variant, basis, copies).unwrap()
    }

    #[test]
    fn dsqc_one_qubit_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = cfg(Variant::Dsqc, BasisSet::computational(1), 8);
        let msg: Bits = "10110010".parse().unwrap();
        let r = run_dsqc(&config, &msg, &Eavesdropper::none(), &mut rng).unwrap();
        assert_eq!(r.decoded_bits.as_ref(), Some(&msg));
        assert_eq!(r.decoy_error_rate, 0.0);
        assert_eq!((r.c, r.q, r.b), (8, 16, 8));
        assert!(!r.aborted);
    }

    #[test]
    fn dsqc_bell_basis_decodes_every_message() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for variant in [Variant::Dsqc, Variant::DsqcGv] {
            let config = cfg(variant, BasisSet::bell(), 2);
            for v in 0..16 {
                let msg = Bits::from_value(v, 4);
                let r = run_dsqc(&config, &msg, &Eavesdropper::none(), &mut rng).unwrap();
                assert_eq!(r.decoded_bits, Some(msg));
            }
        }
    }

    #[test]
    fn qsdc_two_rounds_without_disclosure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = cfg(Variant::Qsdc, BasisSet::bell(), 4);
        let msg: Bits = "10110100".parse().unwrap();
        let r = run_qsdc(&config, &msg, &Eavesdropper::none(), &mut rng).unwrap();
        assert_eq!(r.decoded_bits.as_ref(), Some(&msg));
        assert_eq!(r.rounds, 2);
        assert_eq!((r.c, r.q, r.b), (8, 16, 0));
        assert_eq!(r.transcript.bits_for(Purpose::OrderDisclosure), 0);
    }

    #[test]
    fn qsdc_abort_truncates_before_round_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let config = cfg(Variant::Qsdc, BasisSet::bell(), 40);
        let eve = Eavesdropper::new(AttackModel::InterceptResend {
            basis: BasisPolicy::RandomZx,
        })
        .in_rounds(vec![0]);
        let msg = Bits::random(80, &mut rng);
        let r = run_qsdc(&config, &msg, &eve, &mut rng).unwrap();
        assert!(r.aborted);
        assert_eq!(r.rounds, 1);
        assert_eq!(r.q, 80);
        assert_eq!(r.decoded_bits, None);
    }

    #[test]
    fn variant_mismatch_is_a_config_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let config = cfg(Variant::Qsdc, BasisSet::computational(1), 2);
        let msg: Bits = "10".parse().unwrap();
        assert!(matches!(
            run_dsqc(&config, &msg, &Eavesdropper::none(), &mut rng),
            Err(Error::ConfigInvalid(_))
        ));
        assert!(run(&config, &msg, &Eavesdropper::none(), &mut rng).is_ok());
    }

    #[test]
    fn odd_length_gv_run_pads_with_a_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let config = cfg(Variant::DsqcGv, BasisSet::computational(1), 5);
        let msg: Bits = "10101".parse().unwrap();
        let r = run_dsqc(&config, &msg, &Eavesdropper::none(), &mut rng).unwrap();
        assert_eq!(r.decoded_bits, Some(msg));
        assert_eq!(r.decoys_checked, 3);
        assert_eq!(r.q, 10);
    }

    #[test]
    fn address_width() {
        assert_eq!(address_bits(1), 0);
        assert_eq!(address_bits(2), 1);
        assert_eq!(address_bits(8), 3);
        assert_eq!(address_bits(9), 4);
    }
}
