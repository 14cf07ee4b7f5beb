use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aramid::harness::{run, verify_bounds, Channel, ExperimentConfig, HarnessError, Instance, RunReport, TrialRow};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "aramid",
    version,
    about = "Build expander-code instances and run seeded decoding experiments"
)]
struct Cli {
    /// Worker threads for trials and decoding (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance from a JSON config and write it as JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Accept graphs that miss the expansion hypothesis.
        #[arg(long)]
        allow_weak: bool,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded trials on a plain or coset graph-code instance.
    Run(RunArgs),
    /// Seeded trials on a linear-time encodable instance.
    LtRun(RunArgs),
    /// Seeded trials on a concatenated instance with GMD decoding.
    GmdRun(RunArgs),
    /// Check every bound that applies to an instance and to stored run
    /// reports.
    VerifyBounds {
        #[arg(long)]
        instance: PathBuf,
        /// Run reports (JSON) to audit.
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Symbol errors per trial (inner field symbols for gmd-run).
    #[arg(long, default_value_t = 0)]
    errors: usize,
    #[arg(long, default_value_t = 0)]
    erasures: usize,
    /// Run even when the channel exceeds the guaranteed radius.
    #[arg(long)]
    allow_weak: bool,
    /// Per-trial CSV; the report goes next to it with a .json extension.
    /// Without it the report is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Violation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            _ => 2,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn with_seed(mut config: ExperimentConfig, seed: u64) -> ExperimentConfig {
    match &mut config {
        ExperimentConfig::Plain(c) | ExperimentConfig::Coset(c) => c.seed = seed,
        ExperimentConfig::Lt(c) => c.seed = seed,
        ExperimentConfig::Gmd(c) => c.outer.seed = seed,
    }
    config
}

fn write_csv(path: &Path, rows: &[TrialRow], with_dist: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["trial", "success", "rounds", "calls"];
    if with_dist {
        header.push("dist");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.trial.to_string(),
            r.success.to_string(),
            r.rounds.to_string(),
            r.calls.to_string(),
        ];
        if with_dist {
            rec.push(r.dist.map_or(String::new(), |d| d.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn cmd_run(args: &RunArgs, modes: &[&str], parallel: bool) -> Result<(), CliError> {
    let inst: Instance = read_json(&args.instance)?;
    if !modes.contains(&inst.mode()) {
        return Err(CliError::Usage(format!(
            "instance has mode {}, this subcommand takes {}",
            inst.mode(),
            modes.join(" or ")
        )));
    }
    if let Some(p) = &args.out {
        if p.with_extension("json") == args.instance || *p == args.instance {
            return Err(CliError::Usage("--out would overwrite the instance file".into()));
        }
    }
    let ch = Channel {
        errors: args.errors,
        erasures: args.erasures,
        trials: args.trials,
        seed: args.seed,
    };
    let (within, contract) = inst.contract(ch.errors, ch.erasures);
    if !within {
        if !args.allow_weak {
            return Err(CliError::Usage(format!(
                "t = {}, ρ = {} is outside the guaranteed radius ({contract}); pass --allow-weak to run anyway",
                ch.errors, ch.erasures
            )));
        }
        warn!("channel is outside the guaranteed radius ({contract}); failures are permitted");
    }
    info!("running {} trials on a {} instance", ch.trials, inst.mode());
    let (report, rows) = run(&inst, &ch, parallel)?;
    let text = to_json(&report);
    match &args.out {
        Some(csv_path) => {
            write_csv(csv_path, &rows, matches!(inst.mode(), "lt" | "gmd"))?;
            write_out(Some(&csv_path.with_extension("json")), &text)?;
        }
        None => write_out(None, &text)?,
    }
    eprintln!(
        "{}/{} decoded, max rounds {}, max calls {}{}",
        report.successes,
        report.channel.trials,
        report.max_rounds,
        report.max_calls,
        if report.within_contract {
            ""
        } else {
            " (outside contract)"
        }
    );
    if report.contract_violated() {
        return Err(CliError::Violation(format!(
            "contract violated: {}/{} decoded inside {}, bounds hold: {}",
            report.successes,
            report.channel.trials,
            report.contract,
            report.bounds_hold()
        )));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let parallel = cli.threads != Some(1);
    match cli.command {
        Command::Build {
            config,
            seed,
            allow_weak,
            out,
        } => {
            let mut cfg: ExperimentConfig = read_json(&config)?;
            if let Some(s) = seed {
                cfg = with_seed(cfg, s);
            }
            let inst = Instance::build(&cfg, allow_weak)?;
            write_out(out.as_deref(), &to_json(&inst))
        }
        Command::Run(args) => cmd_run(&args, &["plain", "coset"], parallel),
        Command::LtRun(args) => cmd_run(&args, &["lt"], parallel),
        Command::GmdRun(args) => cmd_run(&args, &["gmd"], parallel),
        Command::VerifyBounds { instance, reports, out } => {
            let inst: Instance = read_json(&instance)?;
            let runs = reports
                .iter()
                .map(|p| read_json::<RunReport>(p))
                .collect::<Result<Vec<_>, _>>()?;
            let checks = verify_bounds(&inst, &runs);
            let mut stderr = std::io::stderr();
            for c in &checks {
                let _ = writeln!(
                    stderr,
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            write_out(out.as_deref(), &to_json(&checks))?;
            match checks.iter().filter(|c| !c.pass).count() {
                0 => Ok(()),
                k => Err(CliError::Violation(format!("{k} bound checks failed"))),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ARAMID_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
