//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p orthosim-cli --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use orthosim::adversary::{apply_attack, AttackContext, AttackModel, BasisPolicy, Eavesdropper};
use orthosim::adversary::{eve_leakage, leakage_for_access, EveAccess};
use orthosim::harness::{
    duality_survey, monogamy_survey, run_experiment, EfficiencyReport, ExperimentSpec,
};
use orthosim::protocol::decoy::{measure_decoys, prepare_decoys, DecoyKind, DecoySpec};
use orthosim::protocol::{encode_block, run, Bits, ProtocolConfig, Variant};
use orthosim::qlinalg::random::{random_basis, random_permutation};
use orthosim::qlinalg::{hermitian_family, unitarity_deviation, BasisSet};
use orthosim::registry::{Holder, Ledger};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Check,
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn config(variant: Variant, basis: BasisSet, copies: usize) -> ProtocolConfig {
    ProtocolConfig::new(variant, basis, copies).expect("valid configuration")
}

fn efficiency_exactness() -> Check {
    let mut r = rng(101);
    let mut runs = 0;
    for variant in Variant::ALL {
        let (want1, want2) = if variant.is_multi_round() {
            (Ratio::new(1u64, 2), Ratio::new(1u64, 2))
        } else {
            (Ratio::new(1u64, 2), Ratio::new(1u64, 3))
        };
        for n in 1..=3 {
            for copies in [1, 2, 5] {
                let cfg = config(variant, random_basis(n, &mut r), copies);
                let msg = Bits::random(cfg.message_len(), &mut r);
                let report = run(&cfg, &msg, &Eavesdropper::none(), &mut r).map_err(|e| e.to_string())?;
                ensure(!report.aborted, format!("{variant} n={n} aborted without an attack"))?;
                let eff = EfficiencyReport::from_report(&report).map_err(|e| e.to_string())?;
                ensure(
                    eff.eta1 == want1 && eff.eta2 == want2,
                    format!("{variant} n={n} N={copies}: η₁={} η₂={}", eff.eta1, eff.eta2),
                )?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} completed runs, DSQC 1/2 & 1/3, QSDC 1/2 & 1/2 exactly"))
}

fn deterministic_decoding() -> Check {
    let mut r = rng(202);
    let mut summary = Vec::new();
    for variant in Variant::ALL {
        let mut runs = 0;
        for n in 1..=3 {
            for _ in 0..100 {
                let basis = random_basis(n, &mut r);
                let m = basis.dim();
                let cfg = config(variant, basis, r.random_range(1..=4))
                    .with_output_perm(random_permutation(m, &mut r))
                    .and_then(|c| c.with_anchor(r.random_range(0..m)))
                    .map_err(|e| e.to_string())?;
                for _ in 0..4 {
                    let msg = Bits::random(cfg.message_len(), &mut r);
                    let report = run(&cfg, &msg, &Eavesdropper::none(), &mut r)
                        .map_err(|e| e.to_string())?;
                    ensure(
                        report.decoded_bits.as_ref() == Some(&msg),
                        format!("{variant} n={n}: sent {msg}, got {:?}", report.decoded_bits),
                    )?;
                    runs += 1;
                }
            }
        }
        summary.push(format!("{variant} {runs}/{runs}"));
    }
    Ok(summary.join(", "))
}

fn bb84_detection() -> Check {
    let mut out = Vec::new();
    for (label, policy) in [("fixed-Z", BasisPolicy::FixedZ), ("random-ZX", BasisPolicy::RandomZx)] {
        let eve = Eavesdropper::new(AttackModel::InterceptResend { basis: policy });
        // δ high enough that no run aborts; every decoy is counted
        let cfg = config(Variant::Dsqc, BasisSet::computational(1), 100)
            .with_delta(0.99)
            .unwrap()
            .with_seed(303);
        let outcome = run_experiment(&ExperimentSpec::new(cfg, eve.clone(), 120))
            .map_err(|e| e.to_string())?;
        let checked: usize = outcome.trials.iter().map(|t| t.report.decoys_checked).sum();
        let errors: usize = outcome.trials.iter().map(|t| t.report.decoy_errors).sum();
        let rate = errors as f64 / checked as f64;
        ensure(checked >= 10_000, format!("only {checked} decoys"))?;
        ensure((rate - 0.25).abs() <= 0.02, format!("{label}: per-decoy error {rate:.4}"))?;

        let cfg = config(Variant::Dsqc, BasisSet::computational(1), 20).with_seed(304);
        let outcome = run_experiment(&ExperimentSpec::new(cfg, eve, 1000)).map_err(|e| e.to_string())?;
        let expected = 1.0 - 0.75f64.powi(20);
        let abort = outcome.stats.detection_rate;
        ensure(
            (abort - expected).abs() <= 0.01,
            format!("{label}: abort rate {abort:.4}, expected {expected:.4}"),
        )?;
        out.push(format!("{label}: error {rate:.4} over {checked}, abort {abort:.4}"));
    }
    Ok(out.join("; "))
}

fn bell_detection() -> Check {
    let pairs = 10_000;
    let mut r = rng(404);

    // one member of each pair measured in Z
    let mut ledger = Ledger::new();
    let spec = DecoySpec::new(DecoyKind::BellPairs, 2 * pairs).unwrap();
    let (decoys, ids) = prepare_decoys(&spec, &mut ledger, &mut r);
    ledger.transfer(&ids, Holder::InTransit).unwrap();
    let firsts: Vec<_> = ids.chunks(2).map(|p| p[0]).collect();
    let code = BasisSet::bell();
    let ctx = AttackContext { round: 0, code_basis: &code };
    apply_attack(&AttackModel::MeasureAll, &mut ledger, &firsts, &ctx, &mut r).map_err(|e| e.to_string())?;
    ledger.transfer(&ids, Holder::Bob).unwrap();
    let single = measure_decoys(&mut ledger, &decoys, &mut r).map_err(|e| e.to_string())?;
    let single_rate = single.error_rate();
    ensure(single.checked == pairs, "pair count")?;
    ensure((single_rate - 0.5).abs() <= 0.02, format!("single-member error {single_rate:.4}"))?;

    // both members measured in Z, through full protocol runs
    let eve = Eavesdropper::new(AttackModel::InterceptResend { basis: BasisPolicy::FixedZ });
    let cfg = config(Variant::DsqcGv, BasisSet::bell(), 50).with_delta(0.99).unwrap().with_seed(405);
    let outcome = run_experiment(&ExperimentSpec::new(cfg, eve, 200)).map_err(|e| e.to_string())?;
    let checked: usize = outcome.trials.iter().map(|t| t.report.decoys_checked).sum();
    let errors: usize = outcome.trials.iter().map(|t| t.report.decoy_errors).sum();
    let double_rate = errors as f64 / checked as f64;
    ensure(checked >= pairs, format!("only {checked} pairs"))?;
    ensure((double_rate - 0.5).abs() <= 0.02, format!("double-member error {double_rate:.4}"))?;
    Ok(format!(
        "single {single_rate:.4} over {pairs} pairs, double {double_rate:.4} over {checked} pairs"
    ))
}

fn family_algebra() -> Check {
    let mut r = rng(505);
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for _ in 0..50 {
            let basis = random_basis(n, &mut r);
            let m = basis.dim();
            let anchor = r.random_range(0..m);
            let family = hermitian_family(&basis, anchor).map_err(|e| e.to_string())?;
            let a = basis.vector(anchor);
            for u in family.ops() {
                let herm = (u - u.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                worst = worst.max(herm).max(unitarity_deviation(u));
            }
            for j in 0..m {
                for k in 0..m {
                    let g = a.apply(&(family.op(j).adjoint() * family.op(k))).unwrap();
                    let v = a.inner(&g);
                    let want = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((v.re - want).abs()).max(v.im.abs());
                }
            }
            let cfg = config(Variant::Dsqc, basis, 1).with_anchor(anchor).map_err(|e| e.to_string())?;
            let codes: Vec<_> = (0..m)
                .map(|v| encode_block(&Bits::from_value(v, n), &cfg).unwrap())
                .collect();
            for j in 0..m {
                for k in 0..m {
                    let want = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((codes[j].inner(&codes[k]).norm() - want).abs());
                }
            }
        }
    }
    ensure(worst < 1e-10, format!("worst deviation {worst:.3e}"))?;
    Ok(format!("M ∈ {{2,4,8}} × 50 bases, worst deviation {worst:.2e}"))
}

fn duality_identity() -> Check {
    let s = duality_survey(1000, 1, 606).map_err(|e| e.to_string())?;
    ensure(s.max_deviation <= 1e-9, format!("|D²+C²−1| up to {:.3e}", s.max_deviation))?;
    let (i, o) = (s.identical_probes, s.orthogonal_probes);
    ensure(
        i.distinguishability == 0.0 && i.coherence == 1.0,
        format!("identical probes gave ({}, {})", i.distinguishability, i.coherence),
    )?;
    ensure(
        o.distinguishability == 1.0 && o.coherence == 0.0,
        format!("orthogonal probes gave ({}, {})", o.distinguishability, o.coherence),
    )?;
    Ok(format!("1000 probes, max |D²+C²−1| = {:.2e}, limits exact", s.max_deviation))
}

fn monogamy() -> Check {
    let s = monogamy_survey(10_000, 707).map_err(|e| e.to_string())?;
    ensure(s.violations == 0 && s.min_slack >= -1e-9, format!("min slack {:.3e}", s.min_slack))?;
    ensure((s.ghz.slack - 1.0).abs() <= 1e-9, format!("GHZ slack {}", s.ghz.slack))?;
    ensure(s.w.slack.abs() <= 1e-9, format!("W slack {}", s.w.slack))?;
    Ok(format!(
        "10000 states, min slack {:.3e}, GHZ {:.3}, W {:.1e}",
        s.min_slack, s.ghz.slack, s.w.slack
    ))
}

fn leakage() -> Check {
    let mut worst_bell = 0.0f64;
    for variant in [Variant::Qsdc, Variant::QsdcGv] {
        for anchor in 0..4 {
            let cfg = config(variant, BasisSet::bell(), 4).with_anchor(anchor).unwrap();
            for s in 0..2 {
                let chi = leakage_for_access(&cfg, &EveAccess::BlockPositions(vec![s]))
                    .map_err(|e| e.to_string())?;
                worst_bell = worst_bell.max(chi.abs());
            }
            let chi = eve_leakage(&cfg, &AttackModel::MeasureAll).map_err(|e| e.to_string())?;
            worst_bell = worst_bell.max(chi.abs());
        }
    }
    ensure(worst_bell <= 1e-9, format!("Bell basis leaks {worst_bell:.3e}"))?;
    let product = config(Variant::Qsdc, BasisSet::computational(2), 4);
    let chi = leakage_for_access(&product, &EveAccess::BlockPositions(vec![0])).map_err(|e| e.to_string())?;
    ensure((chi - 1.0).abs() <= 1e-9, format!("product basis χ = {chi}"))?;
    Ok(format!("Bell χ ≤ {worst_bell:.1e}, product χ = {chi:.12}"))
}

fn reproducibility() -> Check {
    let bin = env!("CARGO_BIN_EXE_orthosim");
    let invocations: &[&[&str]] = &[
        &["run", "--variant", "dsqc", "--n", "2", "--copies", "4", "--message", "1011", "--attack", "none", "--seed", "7"],
        &["run", "--variant", "qsdc-gv", "--basis", "random", "--n", "2", "--trials", "40", "--attack", "intercept-random", "--seed", "8"],
        &["run", "--variant", "dsqc-gv", "--basis", "bell", "--trials", "25", "--output", "csv", "--seed", "9"],
        &["efficiency", "--variant", "dsqc", "--n", "3", "--seed", "10"],
        &["sweep", "--variant", "qsdc", "--copies-list", "2,4", "--trials", "10", "--seed", "11"],
        &["diagnose", "duality", "--samples", "200", "--seed", "12"],
        &["diagnose", "monogamy", "--samples", "500", "--seed", "1"],
        &["diagnose", "leakage", "--variant", "dsqc", "--basis", "bell", "--seed", "13"],
    ];
    for args in invocations {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .args(*args)
                .env_remove("ORTHOSIM_SEED")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), format!("{args:?} exited with {}", out.status))?;
            outputs.push(out.stdout);
        }
        ensure(outputs[0] == outputs[1], format!("{args:?} differs between runs"))?;
        ensure(!outputs[0].is_empty(), format!("{args:?} printed nothing"))?;
    }
    let out = Command::new(bin).args(invocations[0]).output().map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(report["decoded_bits"] == "1011", format!("decoded {}", report["decoded_bits"]))?;
    Ok(format!("{} invocations byte-identical on repeat", invocations.len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "efficiency exactness", budget: Duration::from_secs(1), check: efficiency_exactness },
        Criterion { id: 2, name: "deterministic decoding", budget: Duration::from_secs(30), check: deterministic_decoding },
        Criterion { id: 3, name: "BB84 decoy detection", budget: Duration::from_secs(60), check: bb84_detection },
        Criterion { id: 4, name: "Bell decoy detection", budget: Duration::from_secs(60), check: bell_detection },
        Criterion { id: 5, name: "encoding family algebra", budget: Duration::from_secs(10), check: family_algebra },
        Criterion { id: 6, name: "duality identity", budget: Duration::from_secs(5), check: duality_identity },
        Criterion { id: 7, name: "monogamy", budget: Duration::from_secs(30), check: monogamy },
        Criterion { id: 8, name: "leakage", budget: Duration::from_secs(5), check: leakage },
        Criterion { id: 9, name: "CLI reproducibility", budget: Duration::from_secs(5), check: reproducibility },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if elapsed > c.budget => ("FAIL", format!("over time budget of {:?}", c.budget)),
            Ok(detail) => ("PASS", detail),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "[{status}] {}. {} ({:.2}s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
