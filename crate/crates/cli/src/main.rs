//! Command-line front end: cumulant tables, moment generating functions,
//! sampling, experiments and the verification suite.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 when the library
//! reports an error. In the last case one JSON line
//! `{"error": <kind>, "message": <text>}` is written to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rmtdet::acceptance::{Suite, Tier};
use rmtdet::cumulants::{asymptotic_cumulant, CumulantTable};
use rmtdet::ensembles::{matrix_kind, sample_into, RandomStream};
use rmtdet::error::{Error, Result};
use rmtdet::harness::{run_experiment, sample_log_dets, write_outputs, ExperimentConfig};
use rmtdet::logdet::DenseMatrix;
use rmtdet::moments::{log_mgf_closed, log_mgf_quadrature, EnsembleSpec, Family};
use rmtdet::text::sig17;
use serde_json::{json, Map, Value};

/// Directory used by `experiment` when `--out` is not given.
const OUT_DIR_ENV: &str = "RMTDET_OUT_DIR";

#[derive(Parser)]
#[command(name = "rmtdet", version, about = "Log-determinants of random matrix ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulants Γ_1..Γ_J of log|det|.
    Cumulants {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        jmax: usize,
        /// Also report the large-n approximations of Γ_1 and Γ_2.
        #[arg(long)]
        asymptotic: bool,
        /// Differentiate log M(s) numerically instead of the closed sums.
        #[arg(long)]
        finite_difference: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// log M(s) = log E|det X|^s.
    Mgf {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Integrate the eigenvalue density instead (n ≤ 3).
        #[arg(long)]
        quadrature: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Draws matrices and writes their log|det| values, or the matrices.
    Sample {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// CSV file, or a directory when `--matrices` is set.
        #[arg(long)]
        out: PathBuf,
        /// Write each matrix to `<out>/matrix_<index>.csv`.
        #[arg(long)]
        matrices: bool,
    },
    /// Runs an experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to $RMTDET_OUT_DIR, then `rmtdet-out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the acceptance suite and prints a pass/fail table.
    Verify {
        /// Smaller Monte Carlo runs.
        #[arg(long)]
        quick: bool,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Cumulants { family, n, jmax, asymptotic, finite_difference, format } => {
            let spec = EnsembleSpec::new(family, n)?;
            if jmax == 0 {
                return Err(Error::Input("jmax must be positive".into()));
            }
            let table = if finite_difference {
                CumulantTable::finite_difference(spec, jmax)?
            } else {
                CumulantTable::exact(spec, jmax)?
            };
            let approx = if asymptotic {
                (1..=jmax.min(2)).map(|j| asymptotic_cumulant(&spec, j).map(|a| (j, a.value))).collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            print!("{}", render_cumulants(&table, &approx, format));
        }
        Command::Mgf { family, n, s, quadrature, format } => {
            let spec = EnsembleSpec::new(family, n)?;
            let value = if quadrature { log_mgf_quadrature(&spec, s)? } else { log_mgf_closed(&spec, s)? };
            match format {
                Format::Json => println!("{}", json!({ "family": family, "n": n, "s": s, "log_mgf": value })),
                Format::Csv => print!("family,n,s,log_mgf\n{family},{n},{},{}\n", sig17(s), sig17(value)),
            }
        }
        Command::Sample { family, n, count, seed, out, matrices } => {
            let spec = EnsembleSpec::new(family, n)?;
            if matrices {
                fs::create_dir_all(&out)?;
                let mut m = DenseMatrix::zeros(n, matrix_kind(family)?);
                for i in 0..count {
                    sample_into(family, &mut RandomStream::new(seed, i as u64).generator(), &mut m)?;
                    fs::write(out.join(format!("matrix_{i}.csv")), m.to_csv())?;
                }
            } else {
                let mut csv = String::from("index,log_abs_det\n");
                for (i, v) in sample_log_dets(&spec, seed, 0..count)?.into_iter().enumerate() {
                    let _ = writeln!(csv, "{i},{}", sig17(v));
                }
                fs::write(&out, csv)?;
            }
        }
        Command::Experiment { config, out } => {
            let config = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
            let dir = out
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("rmtdet-out"));
            let experiment = run_experiment(&config)?;
            write_outputs(&experiment, &dir)?;
            println!("{}", dir.join("summary.json").display());
        }
        Command::Verify { quick } => {
            let tier = if quick { Tier::Quick } else { Tier::Full };
            let outcomes = Suite::new(tier).run_all(|o| println!("{}", o.line()));
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            if outcomes.iter().any(|o| o.is_unexpected_failure()) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn render_cumulants(table: &CumulantTable, approx: &[(usize, f64)], format: Format) -> String {
    match format {
        Format::Json => {
            let mut map = Map::new();
            for &(j, v) in &table.values {
                map.insert(format!("j{j}"), json!(v));
            }
            if !approx.is_empty() {
                let a: Map<String, Value> = approx.iter().map(|&(j, v)| (format!("j{j}"), json!(v))).collect();
                map.insert("asymptotic".into(), Value::Object(a));
            }
            format!("{}\n", Value::Object(map))
        }
        Format::Csv => {
            let mut out = String::from(if approx.is_empty() { "j,value\n" } else { "j,value,asymptotic\n" });
            for &(j, v) in &table.values {
                let _ = write!(out, "{j},{}", sig17(v));
                if !approx.is_empty() {
                    let a = approx.iter().find(|(k, _)| *k == j).map_or(String::new(), |(_, a)| sig17(*a));
                    let _ = write!(out, ",{a}");
                }
                out.push('\n');
            }
            out
        }
    }
}
