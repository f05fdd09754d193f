//! `nonherm` command-line front end.
//!
//! Exit codes: 0 success, 1 a `check` invariant failed, 2 usage or
//! configuration error, 3 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::check::{run_checks, Faults};
use crate::error::Error;
use crate::output::{run_json, sweep_json, write_sweep_csv, OutputTable};
use crate::scenarios::{builtin, builtins, run_scenario, sweep, ScenarioConfig, BUILTIN_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nonherm", version, about = "Population tracking for non-Hermitian two-level Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Source {
    /// Builtin scenario (see `nonherm list`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    scenario: Option<String>,
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the number of RK4 steps.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate one scenario and write its trajectory table.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// List builtin scenarios.
    List {
        /// Machine-readable listing.
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, conflicts_with = "json")]
        format: Option<Format>,
    },
    /// Run a scenario for several values of one parameter.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Parameter name: T, steps, w0, delta0, sigma, gamma, phi or turns.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the embedded invariant suite.
    Check {
        /// Only run checks whose name contains this pattern.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("NONHERM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}

fn load(source: &Source) -> Result<ScenarioConfig, Error> {
    let mut cfg = match (&source.scenario, &source.config) {
        (Some(name), _) => builtin(name).ok_or_else(|| {
            Error::Config(format!("unknown scenario '{name}', expected one of {}", BUILTIN_NAMES.join(", ")))
        })?,
        (None, Some(path)) => ScenarioConfig::from_file(path)?,
        (None, None) => return Err(Error::Config("either --scenario or --config is required".into())),
    };
    if let Some(steps) = source.steps {
        cfg.steps = steps;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn open_out<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Error> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(stdout),
    })
}

fn write_json(w: &mut dyn Write, value: &serde_json::Value) -> Result<(), Error> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Config(format!("writing JSON: {e}")))?;
    writeln!(w).map_err(|e| Error::Config(format!("writing JSON: {e}")))
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    let io = |e: io::Error| Error::Config(format!("output error: {e}"));
    match command {
        Command::Run { source, out, format } => {
            let cfg = load(&source)?;
            let run = run_scenario(&cfg)?;
            let mut w = open_out(&out, stdout)?;
            match format {
                Format::Csv => OutputTable::from_run(&run).write_csv(&mut w)?,
                Format::Json => write_json(&mut w, &run_json(&run))?,
            }
            w.flush().map_err(io)?;
            drop(w);
            let last = run.trajectory.final_record();
            let flags = run.artifacts.flags();
            writeln!(
                stderr,
                "{}: {} steps, final |d| = ({:.4e}, {:.4e}), norm^2 = {:.4e}, flags [{}]{}",
                cfg.name,
                cfg.steps,
                last.d[0].norm(),
                last.d[1].norm(),
                last.norm_sq,
                flags.join(", "),
                run.flip.map_or(String::new(), |f| format!(", {f}"))
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::List { json, format } => {
            let all = builtins();
            if json || format == Some(Format::Json) {
                let v: Vec<_> = all
                    .iter()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "description": c.description,
                            "path_kind": c.path.kind(),
                            "duration": c.duration,
                            "steps": c.steps,
                        })
                    })
                    .collect();
                write_json(stdout, &json!(v))?;
            } else {
                for c in &all {
                    writeln!(stdout, "{c}").map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Sweep {
            source,
            param,
            values,
            out,
            format,
        } => {
            let cfg = load(&source)?;
            let points = sweep(&cfg, &param, &values)?;
            let mut w = open_out(&out, stdout)?;
            match format {
                Format::Csv => write_sweep_csv(&points, &mut w)?,
                Format::Json => write_json(&mut w, &sweep_json(&points))?,
            }
            w.flush().map_err(io)?;
            let failed = points.iter().filter(|p| p.outcome.is_err()).count();
            if failed > 0 {
                writeln!(stderr, "{failed} of {} sweep points failed", points.len()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Check { filter, format } => {
            let results = run_checks(filter.as_deref(), &Faults::default());
            if results.is_empty() {
                return Err(Error::Config(format!(
                    "no check matches '{}'",
                    filter.unwrap_or_default()
                )));
            }
            match format {
                Format::Csv => {
                    for r in &results {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        writeln!(stdout, "{status} {}: {}", r.name, r.detail).map_err(io)?;
                    }
                }
                Format::Json => {
                    let v: Vec<_> = results
                        .iter()
                        .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
                        .collect();
                    write_json(stdout, &json!(v))?;
                }
            }
            Ok(if results.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the process exit code.
pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}
