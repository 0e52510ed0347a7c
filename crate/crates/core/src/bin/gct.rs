use clap::{Args, Parser, Subcommand, ValueEnum};
use gct::catalogue;
use gct::dsl::{parse_workspace, CheckKind, CheckRequest, Workspace};
use gct::gac::PwSign;
use gct::involutivity::Thresholds;
use gct::report::{run_report, Report, RunOptions};
use rayon::prelude::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gct",
    version,
    about = "Checks generalized contact structures on parallelizable models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the JSON report to this path (`-` for standard output).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Number of sample points for pointwise checks.
    #[arg(long, global = true, default_value_t = gct::sample::DEFAULT_SAMPLES)]
    samples: usize,
    /// Seed for the frame recombination test.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual at or below which membership is accepted.
    #[arg(long, global = true, default_value_t = Thresholds::default().accept)]
    tol_accept: f64,
    /// Residual at or above which membership is rejected.
    #[arg(long, global = true, default_value_t = Thresholds::default().reject)]
    tol_reject: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks requested in `.gct` files, or the listed ones.
    Check {
        #[arg(required = true, value_name = "FILE.gct")]
        files: Vec<PathBuf>,
        /// Comma-separated checks overriding the files' own `check` statements.
        #[arg(long, value_delimiter = ',', value_name = "CHECK")]
        checks: Vec<String>,
    },
    /// Run a catalogue entry against its expected values.
    Catalogue {
        id: String,
        #[arg(long, value_delimiter = ',', value_name = "CHECK")]
        checks: Vec<String>,
        /// Print the entry's `.gct` source instead of running it.
        #[arg(long)]
        source: bool,
    },
    /// List catalogue entries.
    List,
    /// Run the five-condition battery on one side.
    Battery {
        #[arg(value_name = "FILE|ID")]
        target: String,
        #[arg(long)]
        side: Side,
    },
    /// Quotient data along the Reeb direction.
    Quotient {
        #[arg(value_name = "FILE|ID")]
        target: String,
        /// Fiber direction, a frame or coordinate name.
        #[arg(long)]
        fiber: Option<String>,
        #[arg(long)]
        side: Option<Side>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

impl From<Side> for PwSign {
    fn from(s: Side) -> Self {
        match s {
            Side::Plus => PwSign::Plus,
            Side::Minus => PwSign::Minus,
        }
    }
}

/// Failure before any check ran; exits 2.
struct Usage(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("gct: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Usage> {
    let c = &cli.common;
    if !(c.tol_accept >= 0.0 && c.tol_accept < c.tol_reject) {
        return Err(Usage(
            "--tol-accept must be nonnegative and below --tol-reject".into(),
        ));
    }
    if c.samples == 0 {
        return Err(Usage("--samples must be positive".into()));
    }
    let opts = RunOptions {
        samples: c.samples,
        seed: c.seed,
        thresholds: Thresholds {
            accept: c.tol_accept,
            reject: c.tol_reject,
        },
    };
    match &cli.command {
        Command::List => {
            for e in catalogue::ENTRIES {
                println!("{:<18} {}", e.id, e.summary);
            }
            println!(
                "{:<18} construction on R^(2n+1), n in 1..={} (default {})",
                "r2n1-new(n)",
                catalogue::R2N1_MAX,
                catalogue::R2N1_DEFAULT
            );
            Ok(true)
        }
        Command::Check { files, checks } => {
            let checks = parse_checks(checks)?;
            let workspaces = files
                .iter()
                .map(|f| load_file(f).map(|w| (f.display().to_string(), w)))
                .collect::<Result<Vec<_>, _>>()?;
            let reports: Vec<(String, Result<Report, String>)> = workspaces
                .par_iter()
                .map(|(name, w)| (name.clone(), guarded(w, &checks, &opts)))
                .collect();
            emit(&reports, c.json.as_deref())
        }
        Command::Catalogue { id, checks, source } => {
            if *source {
                print!(
                    "{}",
                    catalogue::source(id).map_err(|e| Usage(e.to_string()))?
                );
                return Ok(true);
            }
            let w = catalogue::load(id).map_err(|e| Usage(e.to_string()))?;
            let checks = parse_checks(checks)?;
            emit(
                &[(id.clone(), guarded(&w, &checks, &opts))],
                c.json.as_deref(),
            )
        }
        Command::Battery { target, side } => {
            let w = load_target(target)?;
            let mut req = CheckRequest::new(CheckKind::Battery);
            req.side = Some((*side).into());
            emit(
                &[(target.clone(), guarded_only(&w, req, &opts))],
                c.json.as_deref(),
            )
        }
        Command::Quotient {
            target,
            fiber,
            side,
        } => {
            let w = load_target(target)?;
            let mut req = CheckRequest::new(CheckKind::Quotient);
            req.fiber = fiber.clone();
            req.side = side.map(Into::into);
            emit(
                &[(target.clone(), guarded_only(&w, req, &opts))],
                c.json.as_deref(),
            )
        }
    }
}

fn parse_checks(names: &[String]) -> Result<Vec<CheckRequest>, Usage> {
    names
        .iter()
        .map(|n| {
            CheckKind::from_name(n.trim())
                .map(CheckRequest::new)
                .ok_or_else(|| {
                    let known: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
                    Usage(format!("unknown check `{n}`; known: {}", known.join(", ")))
                })
        })
        .collect()
}

fn load_file(path: &Path) -> Result<Workspace, Usage> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_workspace(&text).map_err(|e| Usage(format!("{}:{e}", path.display())))
}

/// A path to an existing file, otherwise a catalogue id.
fn load_target(target: &str) -> Result<Workspace, Usage> {
    let path = Path::new(target);
    if path.exists() || target.ends_with(".gct") {
        load_file(path)
    } else {
        catalogue::load(target).map_err(|e| Usage(e.to_string()))
    }
}

/// Runs only `req`, keeping the workspace's expectations out of the verdict.
fn guarded_only(w: &Workspace, req: CheckRequest, opts: &RunOptions) -> Result<Report, String> {
    let mut w = w.clone();
    w.expectations.clear();
    guarded(&w, &[req], opts)
}

/// Converts arithmetic overflow panics (exponent cap) into a failed run.
fn guarded(w: &Workspace, checks: &[CheckRequest], opts: &RunOptions) -> Result<Report, String> {
    catch_unwind(AssertUnwindSafe(|| run_report(w, checks, opts))).map_err(|p| {
        p.downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "internal error".into())
    })
}

fn emit(reports: &[(String, Result<Report, String>)], json: Option<&Path>) -> Result<bool, Usage> {
    let mut ok = true;
    let mut values = Vec::new();
    for (name, r) in reports {
        match r {
            Ok(r) => {
                if json != Some(Path::new("-")) {
                    if reports.len() > 1 {
                        println!("== {name}");
                    }
                    print!("{}", r.summary());
                }
                ok &= r.passed;
                values.push(serde_json::to_value(r).expect("report serializes"));
            }
            Err(msg) => {
                eprintln!("gct: {name}: run aborted: {msg}");
                ok = false;
                values.push(serde_json::json!({ "schema": gct::report::SCHEMA_VERSION, "source": name, "error": msg }));
            }
        }
    }
    if let Some(path) = json {
        let value = if values.len() == 1 {
            values.remove(0)
        } else {
            serde_json::Value::Array(values)
        };
        let text = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
        if path == Path::new("-") {
            print!("{text}");
        } else {
            std::fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(ok)
}
