use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{eve_leakage, Eavesdropper};
use crate::protocol::{run, Bits, ProtocolConfig, RunReport};
use crate::{Error, Result};

/// Report format version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub config: ProtocolConfig,
    /// Fixed message for every trial; random per trial when absent.
    pub message: Option<Bits>,
    pub attack: Eavesdropper,
    pub trials: usize,
}

impl ExperimentSpec {
    pub fn new(config: ProtocolConfig, attack: Eavesdropper, trials: usize) -> Self {
        Self {
            config,
            message: None,
            attack,
            trials,
        }
    }

    pub fn with_message(mut self, message: Bits) -> Self {
        self.message = Some(message);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ConfigInvalid("trials must be at least 1".into()));
        }
        if let Some(m) = &self.message {
            if m.len() != self.config.message_len() {
                return Err(Error::LengthMismatch {
                    expected: self.config.message_len(),
                    found: m.len(),
                });
            }
        }
        self.config.validate()
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub message: Bits,
    pub decoded_ok: bool,
    pub report: RunReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials_run: usize,
    pub aborts: usize,
    pub completions: usize,
    pub decode_successes: usize,
    pub mean_decoy_error_rate: f64,
    /// Fraction of trials aborted by the eavesdropping check.
    pub detection_rate: f64,
    pub mean_leakage_bits: Option<f64>,
}

impl TrialStats {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let run = trials.len();
        let aborts = trials.iter().filter(|t| t.report.aborted).count();
        let mean = |xs: &mut dyn Iterator<Item = f64>| {
            if run == 0 {
                0.0
            } else {
                xs.sum::<f64>() / run as f64
            }
        };
        let leakage: Vec<f64> = trials
            .iter()
            .filter_map(|t| t.report.eve_leakage_bits)
            .collect();
        Self {
            trials_run: run,
            aborts,
            completions: run - aborts,
            decode_successes: trials.iter().filter(|t| t.decoded_ok).count(),
            mean_decoy_error_rate: mean(&mut trials.iter().map(|t| t.report.decoy_error_rate)),
            detection_rate: if run == 0 { 0.0 } else { aborts as f64 / run as f64 },
            mean_leakage_bits: (!leakage.is_empty())
                .then(|| leakage.iter().sum::<f64>() / leakage.len() as f64),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutcome {
    pub stats: TrialStats,
    pub trials: Vec<TrialRecord>,
}

#[derive(Serialize)]
struct ExperimentHeader<'a> {
    variant: String,
    n: usize,
    copies: usize,
    delta: f64,
    seed: u64,
    trials: usize,
    attack: &'a Eavesdropper,
}

impl ExperimentOutcome {
    /// Versioned JSON document; byte-identical for identical inputs.
    pub fn to_json(&self, spec: &ExperimentSpec) -> Result<String> {
        let header = ExperimentHeader {
            variant: spec.config.variant().to_string(),
            n: spec.config.n(),
            copies: spec.config.copies(),
            delta: spec.config.delta(),
            seed: spec.config.seed(),
            trials: spec.trials,
            attack: &spec.attack,
        };
        let doc = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "experiment": header,
            "stats": self.stats,
            "trials": self.trials,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,aborted,error_rate,decoded_ok,c,q,b\n");
        for t in &self.trials {
            let r = &t.report;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t.trial, r.aborted, r.decoy_error_rate, t.decoded_ok, r.c, r.q, r.b
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Leakage bound for the spec, if the configuration is small enough to
/// enumerate.
pub fn experiment_leakage(spec: &ExperimentSpec) -> Result<Option<f64>> {
    match eve_leakage(&spec.config, &spec.attack.model) {
        Ok(chi) => Ok(Some(chi)),
        Err(Error::TooLarge(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs every trial in parallel with seeds derived from the config seed.
/// Results are ordered by trial index.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let leakage = experiment_leakage(spec)?;
    let master = spec.config.seed();
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(master, trial as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let message = match &spec.message {
                Some(m) => m.clone(),
                None => Bits::random(spec.config.message_len(), &mut rng),
            };
            let mut report = run(&spec.config, &message, &spec.attack, &mut rng)?;
            report.eve_leakage_bits = leakage;
            Ok(TrialRecord {
                trial,
                seed,
                decoded_ok: report.decoded_bits.as_ref() == Some(&message),
                message,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutcome {
        stats: TrialStats::from_trials(&trials),
        trials,
    })
}

/// A grid over block count, attack and threshold, sharing everything else
/// with `base`.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: ProtocolConfig,
    pub copies: Vec<usize>,
    pub attacks: Vec<(String, Eavesdropper)>,
    pub deltas: Vec<f64>,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub copies: usize,
    pub attack: String,
    pub delta: f64,
    pub stats: TrialStats,
}

pub fn run_sweep(sweep: &SweepSpec) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::new();
    for &copies in &sweep.copies {
        for (label, attack) in &sweep.attacks {
            for &delta in &sweep.deltas {
                let config = sweep.base.clone().with_copies(copies)?.with_delta(delta)?;
                let spec = ExperimentSpec::new(config, attack.clone(), sweep.trials);
                let outcome = run_experiment(&spec)?;
                points.push(SweepPoint {
                    copies,
                    attack: label.clone(),
                    delta,
                    stats: outcome.stats,
                });
            }
        }
    }
    Ok(points)
}

pub fn sweep_to_json(points: &[SweepPoint]) -> Result<String> {
    let doc = serde_json::json!({ "schema": SCHEMA_VERSION, "points": points });
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(
        "copies,attack,delta,trials,aborts,detection_rate,decode_successes,mean_error_rate\n",
    );
    for p in points {
        let s = &p.stats;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.copies,
            p.attack,
            p.delta,
            s.trials_run,
            s.aborts,
            s.detection_rate,
            s.decode_successes,
            s.mean_decoy_error_rate
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Variant;
    use crate::qlinalg::BasisSet;

    fn spec(trials: usize) -> ExperimentSpec {
        let config = ProtocolConfig::new(Variant::Dsqc, BasisSet::bell(), 3)
            .unwrap()
            .with_seed(11);
        ExperimentSpec::new(config, Eavesdropper::none(), trials)
    }

    #[test]
    fn quiet_channel_never_aborts() {
        let out = run_experiment(&spec(100)).unwrap();
        assert_eq!(out.stats.detection_rate, 0.0);
        assert_eq!(out.stats.decode_successes, 100);
        assert_eq!(out.stats.mean_leakage_bits, Some(0.0));
    }

    #[test]
    fn output_is_reproducible() {
        let s = spec(20);
        let a = run_experiment(&s).unwrap().to_json(&s).unwrap();
        let b = run_experiment(&s).unwrap().to_json(&s).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn seeds_differ_per_trial() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(5, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(5, 0), derive_seed(6, 0));
    }

    #[test]
    fn csv_has_one_row_per_trial() {
        let csv = run_experiment(&spec(4)).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "trial,aborted,error_rate,decoded_ok,c,q,b");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0,false,0,true,6,12,6");
    }

    #[test]
    fn zero_trials_is_invalid() {
        assert!(matches!(run_experiment(&spec(0)), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn sweep_covers_the_grid() {
        let base = ProtocolConfig::new(Variant::Qsdc, BasisSet::computational(1), 1).unwrap();
        let sweep = SweepSpec {
            base,
            copies: vec![2, 4],
            attacks: vec![
                ("none".into(), Eavesdropper::none()),
                ("intercept-z".into(), "intercept-z".parse().unwrap()),
            ],
            deltas: vec![0.0, 0.5],
            trials: 5,
        };
        let points = run_sweep(&sweep).unwrap();
        assert_eq!(points.len(), 8);
        assert_eq!(sweep_to_csv(&points).lines().count(), 9);
    }
}
