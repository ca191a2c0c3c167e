use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use faraday_cv::scenario::{
    resolve_output_dir, run, shipped, shipped_by_id, write_outputs, Format, RunOptions, RunRecord,
    ScenarioConfig, ScenarioError, OUTPUT_DIR_ENV,
};

/// Gaussian light-atom interface simulations driven by scenario files.
#[derive(Parser)]
#[command(name = "faraday-cv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a shipped scenario id.
    Run(RunArgs),
    /// Check a scenario without running it.
    Validate {
        /// Path to a TOML scenario, or the id of a shipped one.
        target: String,
    },
    /// List the shipped scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML scenario, or the id of a shipped one.
    target: String,
    /// Output directory [default: scenario `output.dir`, then $FARADAY_CV_OUT, then ./results]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed; overrides the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    jobs: Option<usize>,
    /// Results format [default: scenario `output.format`, then csv]
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn load(target: &str) -> Result<ScenarioConfig, ScenarioError> {
    let path = Path::new(target);
    if path.exists() {
        return ScenarioConfig::load(path);
    }
    match shipped_by_id(target) {
        Some(s) => s.config(),
        None => Err(ScenarioError::Parse(format!(
            "`{target}` is neither a file nor a shipped scenario (see `faraday-cv list`)"
        ))),
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

const SUMMARY_ROWS: usize = 12;

fn summarize(record: &RunRecord) {
    println!("{} ({})", record.id, record.kind);
    let total: usize = record.cells.iter().map(|c| c.rows.len()).sum();
    let mut shown = 0;
    'cells: for c in &record.cells {
        for r in &c.rows {
            if shown == SUMMARY_ROWS {
                break 'cells;
            }
            let params = c.parameters.iter().map(|(k, v)| format!("{k}={}", fmt_value(v)));
            let values = r
                .iter()
                .filter(|(k, _)| !c.parameters.contains_key(*k))
                .map(|(k, v)| format!("{k}={}", fmt_value(v)));
            println!(
                "  [{}] {}",
                c.cell,
                params.chain(values).collect::<Vec<_>>().join(" ")
            );
            shown += 1;
        }
    }
    if total > shown {
        println!("  ... {} more rows", total - shown);
    }
}

fn run_command(args: RunArgs) -> Result<(), ScenarioError> {
    let config = load(&args.target)?;
    let options = RunOptions {
        seed: args.seed,
        jobs: args.jobs,
    };
    let (record, timing) = run(&config, &options)?;
    for c in &record.cells {
        for a in &c.advisories {
            eprintln!("warning: cell {}: {a}", c.cell);
        }
    }
    let dir = resolve_output_dir(args.out.as_deref(), &config);
    let format = args.format.or(config.output.format).unwrap_or(Format::Csv);
    let files = write_outputs(&record, &timing, &dir, format)?;
    summarize(&record);
    println!(
        "wrote {} ({:.2} s)",
        files.results.display(),
        timing.total_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Validate { target } => load(&target).and_then(|c| {
            let cells = c.validate()?;
            println!("{}: ok ({} cells)", c.id, cells.len());
            Ok(())
        }),
        Command::List => {
            for s in shipped() {
                match s.config() {
                    Ok(c) => println!(
                        "{:<24} {:<26} {}",
                        s.id,
                        c.scenario.kind(),
                        c.description.as_deref().unwrap_or("")
                    ),
                    Err(e) => println!("{:<24} (unreadable: {e})", s.id),
                }
            }
            println!("\nresults go to --out, the scenario's output.dir, ${OUTPUT_DIR_ENV}, or ./results");
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
