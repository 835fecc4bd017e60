use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orthosim::adversary::{eve_leakage, leakage_for_access, AttackModel, Eavesdropper, EveAccess};
use orthosim::harness::{
    duality_survey, monogamy_survey, run_experiment, run_sweep, sweep_to_csv, sweep_to_json,
    EfficiencyReport, ExperimentSpec, SweepSpec,
};
use orthosim::protocol::{basis_preset, Bits, ConfigDocument, ProtocolConfig, Variant};
use orthosim::qlinalg::BasisSet;

#[derive(Parser)]
#[command(name = "orthosim", version, about = "Orthogonal-state secure quantum communication simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more protocol executions.
    Run(RunArgs),
    /// Grid over block count, attack and threshold.
    Sweep(SweepArgs),
    /// Efficiency of one unattacked run.
    Efficiency(ConfigArgs),
    /// Security diagnostics.
    #[command(subcommand)]
    Diagnose(Diagnose),
}

#[derive(Subcommand)]
enum Diagnose {
    /// Which-way versus coherence over random probes.
    Duality(SurveyArgs),
    /// Three-qubit monogamy over random pure states.
    Monogamy(SurveyArgs),
    /// Holevo bound on Eve's share of a code block.
    Leakage(LeakageArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Protocol variant.
    #[arg(long, default_value = "dsqc")]
    variant: Variant,
    /// Qubits per code block; 1 unless the basis fixes it.
    #[arg(long)]
    n: Option<usize>,
    /// Number of code blocks.
    #[arg(long)]
    copies: Option<usize>,
    /// Message as a binary or 0x-hex string.
    #[arg(long)]
    message: Option<Bits>,
    /// Basis preset: computational, bell, ghz or random.
    #[arg(long, default_value = "computational")]
    basis: String,
    /// JSON basis document, overriding --basis.
    #[arg(long)]
    basis_file: Option<PathBuf>,
    /// JSON protocol configuration, overriding the basis options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Index of the initial state in the basis.
    #[arg(long)]
    anchor: Option<usize>,
    /// Abort threshold on the decoy error rate.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, env = "ORTHOSIM_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Attack as JSON or a preset name.
    #[arg(long, default_value = "none")]
    attack: Eavesdropper,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Exit with status 1 if any trial aborts.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Block counts to try.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    copies_list: Vec<usize>,
    /// Attack presets to try.
    #[arg(long, value_delimiter = ',', default_value = "none,intercept-random")]
    attacks: Vec<String>,
    /// Thresholds to try.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Probe register size for the duality survey.
    #[arg(long, default_value_t = 1)]
    probe_qubits: usize,
    #[arg(long, env = "ORTHOSIM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LeakageArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Block positions Eve holds; defaults to the access the variant gives her.
    #[arg(long, value_delimiter = ',')]
    positions: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure after configuration succeeded.
#[derive(Debug)]
struct Aborted;

impl std::fmt::Display for Aborted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("protocol aborted by the eavesdropping check")
    }
}

impl std::error::Error for Aborted {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Aborted>() => {
            eprintln!("orthosim: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("orthosim: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Efficiency(args) => efficiency(args),
        Command::Diagnose(Diagnose::Duality(args)) => {
            let survey = duality_survey(args.samples, args.probe_qubits, args.seed)?;
            emit(args.out.as_deref(), &to_json(&survey)?)
        }
        Command::Diagnose(Diagnose::Monogamy(args)) => {
            let survey = monogamy_survey(args.samples, args.seed)?;
            emit(args.out.as_deref(), &to_json(&survey)?)
        }
        Command::Diagnose(Diagnose::Leakage(args)) => leakage(args),
    }
}

impl ConfigArgs {
    fn build(&self) -> Result<ProtocolConfig> {
        let seed = self.seed.unwrap_or(0);
        let mut config = if let Some(path) = &self.config {
            let text = read(path)?;
            let mut doc: ConfigDocument =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(copies) = self.copies {
                doc.copies = copies;
            }
            doc.into_config()?
        } else {
            let basis = self.basis()?;
            let copies = self.copies_for(basis.qubit_count())?;
            ProtocolConfig::new(self.variant, basis, copies)?
        };
        if self.config.is_none() || self.seed.is_some() {
            config = config.with_seed(seed);
        }
        if let Some(anchor) = self.anchor {
            config = config.with_anchor(anchor)?;
        }
        if let Some(delta) = self.delta {
            config = config.with_delta(delta)?;
        }
        if let Some(m) = &self.message {
            if m.len() != config.message_len() {
                bail!(
                    "message has {} bits but the configuration carries {}",
                    m.len(),
                    config.message_len()
                );
            }
        }
        Ok(config)
    }

    fn basis(&self) -> Result<BasisSet> {
        let basis = match &self.basis_file {
            Some(path) => BasisSet::from_json(&read(path)?)?,
            None => {
                let n = self.n.or((self.basis != "bell").then_some(1));
                basis_preset(&self.basis, n, self.seed.unwrap_or(0))?
            }
        };
        if let Some(n) = self.n {
            if basis.qubit_count() != n {
                bail!("basis has {} qubits, --n asks for {n}", basis.qubit_count());
            }
        }
        Ok(basis)
    }

    /// A message fixes the block count; `--copies` only matters without one.
    fn copies_for(&self, n: usize) -> Result<usize> {
        let Some(m) = &self.message else {
            return Ok(self.copies.unwrap_or(4));
        };
        if m.is_empty() || m.len() % n != 0 {
            bail!("message length {} is not a multiple of n = {n}", m.len());
        }
        let copies = m.len() / n;
        if let Some(asked) = self.copies.filter(|&c| c != copies) {
            eprintln!("orthosim: ignoring --copies {asked}: a {}-bit message needs {copies} blocks", m.len());
        }
        Ok(copies)
    }
}

fn run(args: RunArgs) -> Result<()> {
    let config = args.config.build()?;
    let mut spec = ExperimentSpec::new(config, args.attack, args.trials);
    if let Some(m) = args.config.message.clone() {
        spec = spec.with_message(m);
    }
    let outcome = run_experiment(&spec)?;
    let text = match args.output.output {
        Format::Csv => outcome.to_csv(),
        Format::Json if args.trials == 1 => to_json(&outcome.trials[0].report)?,
        Format::Json => outcome.to_json(&spec)?,
    };
    emit(args.output.out.as_deref(), &text)?;
    if args.strict && outcome.stats.aborts > 0 {
        return Err(Aborted.into());
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = args.config.build()?;
    let attacks = args
        .attacks
        .iter()
        .map(|name| Ok((name.clone(), Eavesdropper::parse(name)?)))
        .collect::<Result<Vec<_>>>()?;
    let points = run_sweep(&SweepSpec {
        base,
        copies: args.copies_list,
        attacks,
        deltas: args.deltas,
        trials: args.trials,
    })?;
    let text = match args.output.output {
        Format::Json => sweep_to_json(&points)?,
        Format::Csv => sweep_to_csv(&points),
    };
    emit(args.output.out.as_deref(), &text)
}

fn efficiency(args: ConfigArgs) -> Result<()> {
    let config = args.build()?;
    let mut spec = ExperimentSpec::new(config, Eavesdropper::none(), 1);
    if let Some(m) = args.message.clone() {
        spec = spec.with_message(m);
    }
    let outcome = run_experiment(&spec)?;
    let report = EfficiencyReport::from_report(&outcome.trials[0].report)?;
    emit(None, &to_json(&report)?)
}

#[derive(Serialize)]
struct LeakageReport {
    variant: Variant,
    n: usize,
    access: serde_json::Value,
    chi_bits: f64,
}

fn leakage(args: LeakageArgs) -> Result<()> {
    let config = args.config.build()?;
    let (access, chi) = match args.positions {
        Some(p) => {
            let access = EveAccess::BlockPositions(p);
            let chi = leakage_for_access(&config, &access)?;
            (serde_json::to_value(access)?, chi)
        }
        None => {
            let access = if config.variant().is_multi_round() {
                "worst_single_position"
            } else {
                "scrambled_block"
            };
            (access.into(), eve_leakage(&config, &AttackModel::MeasureAll)?)
        }
    };
    let report = LeakageReport {
        variant: config.variant(),
        n: config.n(),
        access,
        chi_bits: chi,
    };
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
