use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smoothlab::harness::{self, defaults, ExperimentConfig, ExperimentKind, ExperimentReport, ReplayRecord};
use smoothlab::Error;

/// Run smoothed online classification experiments.
///
/// Exit status: 0 when every flag passes, 1 when one fails, 2 on a
/// configuration error.
#[derive(Parser)]
#[command(name = "smoothlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a learner against an adversary and compare with the regret bounds.
    RunRegret(Common),
    /// Learning curve of the compression learner against its generalization bound.
    RunPacCurve(Common),
    /// Estimate class complexity, evaluate the entropy bound, and play a cover learner.
    RunSufficiency(Common),
    /// Round-trip random realizable samples through the compression scheme.
    VerifyCompression(Common),
    /// Check the metric-entropy inequalities on random small instances.
    EntropySuite(Common),
    /// Replay a recorded game and check that it reproduces its report.
    Replay {
        /// A file from an experiment's `replays/` directory.
        #[arg(long)]
        bundle: PathBuf,
        /// Where to write the replayed report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Number of trials.
    #[arg(long)]
    trials: Option<usize>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::Csv(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load(common: &Common, kind: ExperimentKind, required: bool) -> Result<ExperimentConfig, Failure> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None if required => {
            return Err(Failure::Config(format!(
                "this experiment needs --config (a {} configuration)",
                kind_name(kind)
            )))
        }
        None => {
            let mut c = ExperimentConfig::new(kind);
            if kind == ExperimentKind::Compression {
                c.trials = defaults::COMPRESSION_TRIALS;
            }
            c
        }
    };
    if config.kind != kind {
        return Err(Failure::Config(format!(
            "field `kind`: expected \"{}\" for this subcommand, found \"{}\"",
            kind_name(kind),
            kind_name(config.kind)
        )));
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    config.validate()?;
    Ok(config)
}

fn kind_name(kind: ExperimentKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn run_and_write(common: &Common, kind: ExperimentKind, required: bool) -> Result<bool, Failure> {
    let config = load(common, kind, required)?;
    let report = harness::run_experiment(&config)?;
    let records = match kind {
        ExperimentKind::Regret | ExperimentKind::Sufficiency => "regret.csv",
        ExperimentKind::PacCurve => "errors.csv",
        ExperimentKind::Compression => "round_trips.csv",
        ExperimentKind::EntropySuite => "records.csv",
    };
    report.write(&common.out, records)?;
    print_flags(&report);
    println!("wrote {}", common.out.display());
    Ok(report.passed())
}

fn print_flags(report: &ExperimentReport) {
    for f in &report.flags {
        println!(
            "{} {}: observed {:.4}, threshold {:.4} ({}) [{}]",
            if f.passed { "PASS" } else { "FAIL" },
            f.name,
            f.observed,
            f.threshold,
            f.detail,
            f.cites
        );
    }
}

fn replay_bundle(path: &Path, out: Option<&Path>) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read bundle {}: {e}", path.display())))?;
    let record: ReplayRecord =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("malformed bundle: {e}")))?;
    let fresh = harness::replay(&record)?;
    let same = fresh == record.report;
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(Error::from)?;
        std::fs::write(
            out.join("report.json"),
            serde_json::to_string_pretty(&fresh).map_err(Error::from)?,
        )
        .map_err(Error::from)?;
    }
    println!(
        "{} replay of seed {} run {}: learner loss {} (recorded {}), regret {:?} (recorded {:?})",
        if same { "PASS" } else { "FAIL" },
        record.seed,
        record.run,
        fresh.learner_loss,
        record.report.learner_loss,
        fresh.regret,
        record.report.regret
    );
    Ok(same)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::RunRegret(c) => run_and_write(c, ExperimentKind::Regret, true),
        Command::RunPacCurve(c) => run_and_write(c, ExperimentKind::PacCurve, false),
        Command::RunSufficiency(c) => run_and_write(c, ExperimentKind::Sufficiency, true),
        Command::VerifyCompression(c) => run_and_write(c, ExperimentKind::Compression, false),
        Command::EntropySuite(c) => run_and_write(c, ExperimentKind::EntropySuite, false),
        Command::Replay { bundle, out } => replay_bundle(bundle, out.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
