use std::path::PathBuf;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use convmetrics::{MetricId, Validity};
use convmetrics_harness::{
    diff_dataset, emit_report_with_notes, exit_code, load_dataset_with, run_variants_detailed, write_report, Dataset,
    DiscrepancyClass, LoadOptions, Preset, ReportFormat, RunConfig, TaskFamily, Tolerances, DEFAULT_STOCHASTIC_TOLERANCE,
    DEFAULT_TOLERANCE,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "convmetrics", version, about = "Sweep metric conventions and classify the discrepancies")]
struct Cli {
    /// Seed for Monte Carlo variants.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    task: TaskFamily,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    truth_col: Option<String>,
    #[arg(long)]
    pred_col: Option<String>,
    /// Provided cluster centers (clustering only).
    #[arg(long)]
    centers: Option<PathBuf>,
    /// `all` or a preset name.
    #[arg(long, default_value = "all")]
    variants: Preset,
    /// Comma-separated metric names; default is every metric of the task.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<MetricId>>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every selected variant.
    Compute {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify pairwise discrepancies between variants.
    Diff {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_STOCHASTIC_TOLERANCE)]
        stochastic_tol: f64,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep pairs that agree within tolerance.
        #[arg(long)]
        all: bool,
    },
    /// List metrics and their registered variants.
    ListMetrics {
        #[arg(long)]
        task: Option<TaskFamily>,
    },
}

fn prepare(input: &Input, seed: u64) -> Result<(Dataset, RunConfig)> {
    let opts = LoadOptions {
        truth_col: input.truth_col.clone(),
        pred_col: input.pred_col.clone(),
        centers: input.centers.clone(),
    };
    let data = load_dataset_with(&input.input, input.task, &opts)
        .with_context(|| format!("loading {}", input.input.display()))?;
    let mut config = RunConfig::new(input.task);
    config.metrics = input.metrics.clone();
    config.preset = input.variants;
    config.seed = seed;
    config.input = Some(input.input.clone());
    config.validate()?;
    Ok((data, config))
}

fn number(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        Some(x) if x.is_nan() => json!("nan"),
        Some(x) if x > 0.0 => json!("inf"),
        Some(_) => json!("-inf"),
        None => Value::Null,
    }
}

fn validity(v: Validity) -> &'static str {
    match v {
        Validity::Ok => "ok",
        Validity::Undefined => "undefined",
        Validity::OutOfDomain => "out_of_domain",
    }
}

fn compute(input: &Input, out: PathBuf, seed: u64) -> Result<u8> {
    let (data, mut config) = prepare(input, seed)?;
    config.output = Some(out.clone());
    let mut results = Vec::new();
    for m in config.selected_metrics() {
        for o in run_variants_detailed(&data, m, &config) {
            let v = &o.value;
            let mut entry = json!({
                "metric": m.name(),
                "variant": v.descriptor.label(),
                "value": number(v.as_scalar()),
                "validity": validity(v.validity),
            });
            if let Some(pc) = v.as_per_class() {
                entry["per_class"] = json!(pc);
            }
            if let Some(e) = o.error {
                entry["error"] = json!(e);
            }
            results.push(entry);
        }
    }
    let doc = json!({ "task": config.task.name(), "seed": seed, "results": results });
    write_report(&out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(0)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { input, out } => compute(&input, out, cli.seed),
        Command::Diff {
            input,
            tol,
            stochastic_tol,
            format,
            out,
            all,
        } => {
            let (data, mut config) = prepare(&input, cli.seed)?;
            config.tolerances = Tolerances {
                exact: tol,
                stochastic: stochastic_tol,
            };
            config.output = out.clone();
            let mut records = diff_dataset(&data, &config)?;
            if !all {
                records.retain(|r| r.classification != DiscrepancyClass::None);
            }
            let notes: Vec<String> = config.preset.note().map(String::from).into_iter().collect();
            let doc = emit_report_with_notes(&records, format, &notes);
            match out {
                Some(p) => write_report(&p, &doc)?,
                None => emit_stdout(&doc)?,
            }
            Ok(exit_code(&records) as u8)
        }
        Command::ListMetrics { task } => {
            let tasks: Vec<TaskFamily> = task.map_or_else(|| TaskFamily::ALL.to_vec(), |t| vec![t]);
            let mut text = String::new();
            for t in tasks {
                text += &format!("{t}\n");
                let config = RunConfig::new(t);
                for m in t.metrics() {
                    let vs = config.variants(m, None);
                    text += &format!("  {m} ({} variants)\n", vs.len());
                    for d in vs {
                        text += &format!("    {}\n", d.label());
                    }
                }
            }
            emit_stdout(&text)?;
            Ok(0)
        }
    }
}
