use std::path::PathBuf;
use std::process::ExitCode;

use aucgap::Execution;
use aucgap_cli::config::{AuditConfig, BootstrapConfig, TaskKind};
use aucgap_cli::error::{exit, CliError};
use aucgap_cli::{parse_recipe, plot, read_reports, report, run_audit, write_synthetic};
use clap::{Args, Parser, Subcommand};

/// Subgroup AUC gap audits for scored predictions.
#[derive(Debug, Parser)]
#[command(name = "aucgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Compute per-group AUCs and the AUC gap for one model.
    Audit(AuditArgs),
    /// Write a synthetic binormal cohort as CSV.
    Synth(SynthArgs),
    /// Combine reports into plot-ready series.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// TOML config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    model_name: Option<String>,
    #[arg(long, value_enum)]
    task: Option<TaskKind>,
    /// Positive when the true value is >= threshold (task real-threshold).
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    #[arg(long)]
    score_column: Option<String>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    positive_label: Option<String>,
    /// One group per value of this attribute (repeatable).
    #[arg(long = "group-by")]
    group_by: Vec<String>,
    /// Comma-joined attributes to intersect, e.g. gender,ses (repeatable).
    #[arg(long)]
    intersect: Vec<String>,
    #[arg(long)]
    fold_column: Option<String>,
    #[arg(long)]
    min_pos: Option<usize>,
    #[arg(long)]
    min_neg: Option<usize>,
    /// Add a percentile bootstrap interval for the gap.
    #[arg(long)]
    bootstrap: bool,
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    report_out: Option<PathBuf>,
    #[arg(long)]
    plot_out: Option<PathBuf>,
    /// Treat empty attribute cells as the "(missing)" category.
    #[arg(long)]
    allow_missing: bool,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// name:n_pos:n_neg:d_prime (repeatable).
    #[arg(long = "group", required = true)]
    groups: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Report JSON files, one per model.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Output JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl AuditArgs {
    fn into_config(self) -> Result<(AuditConfig, Execution), CliError> {
        let base = match &self.config {
            Some(path) => AuditConfig::load(path)?,
            None => AuditConfig::default(),
        };
        let non_empty = |v: Vec<String>| (!v.is_empty()).then_some(v);
        let intersect = non_empty(self.intersect).map(|specs| {
            specs
                .iter()
                .map(|s| s.split(',').map(|a| a.trim().to_owned()).collect())
                .collect()
        });
        let bootstrap = (self.bootstrap || self.resamples.is_some() || self.seed.is_some()).then(|| BootstrapConfig {
            enabled: self.bootstrap.then_some(true),
            resamples: self.resamples,
            seed: self.seed,
        });
        let flags = AuditConfig {
            input: self.input,
            model_name: self.model_name,
            task: self.task,
            threshold: self.threshold,
            score_column: self.score_column,
            label_column: self.label_column,
            positive_label: self.positive_label,
            group_by: non_empty(self.group_by),
            intersect,
            fold_column: self.fold_column,
            min_pos: self.min_pos,
            min_neg: self.min_neg,
            allow_missing: self.allow_missing.then_some(true),
            bootstrap,
            report_out: self.report_out,
            plot_out: self.plot_out,
            ..AuditConfig::default()
        };
        let execution = if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        Ok((base.overlay(flags), execution))
    }
}

fn audit(args: AuditArgs) -> Result<(), CliError> {
    let (config, execution) = args.into_config()?;
    let resolved = config.resolve()?;
    let report = run_audit(&resolved, execution)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    print!("{}", report::render_table(&report));
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let recipes = args
        .groups
        .iter()
        .map(|g| parse_recipe(g))
        .collect::<Result<Vec<_>, _>>()?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            let n = write_synthetic(&recipes, args.seed, std::io::BufWriter::new(file))?;
            eprintln!("wrote {n} records to {}", path.display());
        }
        None => {
            write_synthetic(&recipes, args.seed, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn plot_data(args: PlotArgs) -> Result<(), CliError> {
    let reports = read_reports(&args.reports)?;
    match &args.out {
        Some(path) => {
            plot::emit_plot_data(&reports, path)?;
        }
        None => print!("{}", plot::build_plot_data(&reports)?.to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Audit(args) => audit(args),
        Command::Synth(args) => synth(args),
        Command::PlotData(args) => plot_data(args),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
