use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use reid_cli::combine::combine_files;
use reid_cli::config::RunConfig;
use reid_cli::demo::{generate_records, run_demo};
use reid_cli::massfile::SetFunctionFile;
use reid_cli::risk::{assess, RiskOptions};
use reid_cli::table_io::{masked_to_string, read_table};
use reid_cli::CliError;
use reid_core::reident::{mask_generalize, N3Record, Value};

#[derive(Parser)]
#[command(name = "reid", version, about = "Generalization masking and belief-based re-identification risk")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the generalized table as CSV.
    Mask,
    /// Write a JSON risk report for every record and attribute subset.
    Risk,
    /// Fold mass files with a combination rule, checked against a true probability.
    Combine {
        /// Mass file whose focal sets are singletons.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value = "conjunctive")]
        rule: String,
        /// Permit the dempster rule, which renormalizes conflict.
        #[arg(long)]
        allow_normalization: bool,
        #[arg(required = true, num_args = 2..)]
        masses: Vec<PathBuf>,
    },
    /// Unit-noise scenario in ℕ³ whose pignistic argmax has zero true probability.
    DemoN3 {
        /// Number of records in the generated table.
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// CSV of records with three non-negative integer columns, used instead of a generated table.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Protected record, as `a,b,c`.
        #[arg(long, default_value = "0,0,0", value_parser = parse_triple)]
        y: N3Record,
        /// Condition the posterior on a known noise flag.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        reveal_alpha: Option<u8>,
    },
    /// Validate a mass or belief file.
    Validate { file: PathBuf },
}

fn parse_triple(s: &str) -> Result<N3Record, String> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected three comma-separated naturals".to_string())
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    emit(output, &text)
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    RunConfig::load(path)
}

fn read_n3_records(path: &Path) -> Result<Vec<N3Record>, CliError> {
    let table = read_table(path)?;
    if table.n_attributes() != 3 {
        return Err(CliError::parse(path, "expected three columns"));
    }
    table
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = [0u64; 3];
            for (slot, v) in r.iter_mut().zip(row) {
                *slot = match v {
                    Value::Int(n) if *n >= 0 => *n as u64,
                    other => {
                        return Err(CliError::parse(path, format!("line {}: `{other}` is not a natural", i + 2)));
                    }
                };
            }
            Ok(r)
        })
        .collect()
}

#[derive(Serialize)]
struct ValidationOutput {
    valid: bool,
    violations: Vec<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Mask => {
            let config = load_config(&cli)?;
            let table = read_table(&config.input)?;
            let scheme = config.scheme(&table)?;
            let masked = mask_generalize(&table, &scheme)?;
            let out = cli.output.as_deref().or(config.output.as_deref());
            emit(out, &masked_to_string(&masked))
        }
        Command::Risk => {
            let config = load_config(&cli)?;
            let table = read_table(&config.input)?;
            let scheme = config.scheme(&table)?;
            let subsets = config.attribute_subsets(&table)?;
            let opts = RiskOptions {
                subsets: &subsets,
                measures: &config.measures,
                threads: cli.threads,
            };
            let report = assess(&table, &scheme, &opts)?;
            emit_json(cli.output.as_deref().or(config.output.as_deref()), &report)?;
            let bad = report.incompatibilities();
            if let Some((record, attrs)) = bad.first() {
                return Err(CliError::Inconsistent(format!(
                    "{} incompatible beliefs, first at record {record} on {attrs:?}",
                    bad.len()
                )));
            }
            Ok(())
        }
        Command::Combine {
            truth,
            rule,
            allow_normalization,
            masses,
        } => {
            let truth = SetFunctionFile::load(truth)?;
            let inputs = masses.iter().map(|p| SetFunctionFile::load(p)).collect::<Result<Vec<_>, _>>()?;
            let report = combine_files(&inputs, &truth, rule, *allow_normalization)?;
            emit_json(cli.output.as_deref(), &report)?;
            if report.is_failure() {
                return Err(CliError::Inconsistent("combination is not acceptable".into()));
            }
            Ok(())
        }
        Command::DemoN3 {
            size,
            records,
            y,
            reveal_alpha,
        } => {
            let seed = cli.seed.unwrap_or(0);
            let records = match records {
                Some(path) => read_n3_records(path)?,
                None => generate_records(seed, *size)?,
            };
            let report = run_demo(seed, records, *y, *reveal_alpha)?;
            emit_json(cli.output.as_deref(), &report)
        }
        Command::Validate { file } => {
            let f = SetFunctionFile::load(file)?;
            let violations = f.validate().map_err(|e| CliError::parse(file, e))?;
            let out = ValidationOutput {
                valid: violations.is_empty(),
                violations: violations.iter().map(ToString::to_string).collect(),
            };
            emit_json(cli.output.as_deref(), &out)?;
            if !out.valid {
                return Err(CliError::Inconsistent(format!("{} violations", out.violations.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage errors would exit with 2, which is reserved here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
