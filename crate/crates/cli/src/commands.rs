use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::audit::audit_separability;
use crate::config::{output_path, Config, Section};
use crate::error::{config, CliError, CliResult};
use crate::protocol::run_protocol;
use crate::sweep::{find_threshold, run_sweep, threshold_csv, SweepSpec, ThresholdSpec};

#[derive(Debug, Parser)]
#[command(name = "ecs", version, about = "Balanced entangled coherent states: sweeps, thresholds, audits, protocol runs")]
pub struct Cli {
    /// JSON configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file (default: the section's `output`, then $ECS_OUT_DIR, then stdout)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for random draws
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Parameter override, repeatable; `name=start:stop:steps` defines an axis
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectionArg {
    Sweep,
    Threshold,
    Audit,
    Protocol,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a quantity on a 1- or 2-axis grid and write CSV
    Sweep,
    /// Bisect the monogamy residual for its sign change
    Threshold,
    /// Compare numerical separability with the weight criterion on random states
    AuditSeparability,
    /// Simulate the V-product and beam-splitter cascade in a truncated Fock space
    Protocol,
    /// Print the configuration after flags and overrides
    ShowConfig {
        /// Section that `--set` overrides apply to
        #[arg(long = "for", value_enum, default_value = "sweep")]
        section: SectionArg,
    },
}

fn section_of(cmd: &Command) -> Section {
    match cmd {
        Command::Sweep => Section::Sweep,
        Command::Threshold => Section::Threshold,
        Command::AuditSeparability => Section::Audit,
        Command::Protocol => Section::Protocol,
        Command::ShowConfig { section } => match section {
            SectionArg::Sweep => Section::Sweep,
            SectionArg::Threshold => Section::Threshold,
            SectionArg::Audit => Section::Audit,
            SectionArg::Protocol => Section::Protocol,
        },
    }
}

/// Loads the configuration and applies flags; flags win.
pub fn effective_config(cli: &Cli) -> CliResult<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let section = section_of(&cli.command);
    for s in &cli.sets {
        cfg.apply_set(section, s)?;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    Ok(cfg)
}

fn emit(path: Option<PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(&p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_file(p: &Path, text: &str) -> CliResult<()> {
    let io = |source| CliError::Io { path: p.display().to_string(), source };
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(p, text).map_err(io)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = effective_config(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sweep => {
            let section = cfg.sweep.as_ref().ok_or_else(|| config("sweep: no sweep section"))?;
            let spec = SweepSpec::new(section)?;
            let table = run_sweep(&spec, cfg.jobs)?;
            let name = format!("{}.csv", spec.quantity);
            emit(output_path(out, spec.output_path.as_deref(), &name), &table.to_csv())
        }
        Command::Threshold => {
            let section = cfg.threshold.as_ref().ok_or_else(|| config("threshold: no threshold section"))?;
            let spec = ThresholdSpec::new(section)?;
            let root = find_threshold(&spec)?;
            emit(output_path(out, section.output.as_deref(), "threshold.csv"), &threshold_csv(&spec, root))
        }
        Command::AuditSeparability => {
            let settings = cfg.audit.clone().unwrap_or_default();
            let seed = cfg.seed.unwrap_or(0);
            let report = audit_separability(&settings, seed, cfg.jobs)?;
            emit(output_path(out, settings.output.as_deref(), "separability_audit.csv"), &report.to_csv())?;
            eprintln!("{}", report.summary());
            let bad = report.trials.len() - report.agreements();
            if bad > 0 {
                return Err(CliError::AuditFailed { disagreements: bad, trials: report.trials.len() });
            }
            Ok(())
        }
        Command::Protocol => {
            let section = cfg.protocol.clone().unwrap_or_default();
            let report = run_protocol(&section)?;
            emit(output_path(out, section.output.as_deref(), "protocol.csv"), &report.to_csv())?;
            eprintln!("{}", report.summary());
            Ok(())
        }
        Command::ShowConfig { .. } => {
            let text = serde_json::to_string_pretty(&cfg).map_err(|e| config(e.to_string()))? + "\n";
            emit(out.map(Path::to_path_buf), &text)
        }
    }
}
