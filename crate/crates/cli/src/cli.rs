use std::ffi::OsString;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use geodiscover_core::algebra::{algebraize_construction, algebraize_statement};
use geodiscover_core::dsl::DslErrorKind;
use geodiscover_core::numeric::NumericSamples;
use geodiscover_core::prover::Certificate;
use geodiscover_core::{
    decide_statement, discover, parse_dsl, DiscoveryConfig, DiscoveryError, NumericConfig, ParsedFile,
    ProofVerdict, ProverConfig, Verdict,
};

use crate::{hide_points, parse_statement, server};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REFUTED: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_INVALID_INPUT: u8 = 4;
pub const EXIT_DEGENERATE: u8 = 5;
pub const EXIT_INTERNAL: u8 = 6;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "geodiscover",
    version,
    about = "Automated discovery of theorems in planar constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finds every non-trivial theorem about a target point.
    Discover {
        file: PathBuf,
        /// Target point; defaults to the file's `discover` directive.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        prover: ProverArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        json: bool,
        /// Points to leave out of the candidates, comma separated.
        #[arg(long, value_delimiter = ',')]
        hide: Vec<String>,
        /// Report every time as zero so that output is reproducible.
        #[arg(long)]
        no_timings: bool,
        /// Test every candidate instead of skipping implied ones.
        #[arg(long)]
        brute_force: bool,
    },
    /// Decides one statement symbolically.
    Prove {
        file: PathBuf,
        /// e.g. `collinear A B C` or `parallel(D,E,A,B)`.
        #[arg(required = true, num_args = 1..)]
        statement: Vec<String>,
        #[command(flatten)]
        prover: ProverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Tests one statement numerically on the figure and random redraws.
    Check {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        statement: Vec<String>,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Prints the polynomial translation of the construction.
    DumpIdeal {
        file: PathBuf,
        /// Also print the theses of this statement.
        #[arg(long)]
        statement: Option<String>,
    },
    /// Runs the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Total wall-time cap per discovery request, in seconds.
        #[arg(long, default_value_t = 60.0, value_parser = positive_seconds)]
        wall_cap: f64,
    },
}

#[derive(Args, Debug)]
struct ProverArgs {
    /// Budget per symbolic check, in seconds.
    #[arg(long, default_value_t = 5.0, value_parser = positive_seconds)]
    timeout: f64,
    /// Fix two free points before proving.
    #[arg(long)]
    pin: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct NumericArgs {
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long = "numeric-seed")]
    numeric_seed: Option<u64>,
}

impl NumericArgs {
    fn config(&self, fallback_seed: u64) -> NumericConfig {
        let d = NumericConfig::default();
        NumericConfig {
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            resamples: self.resamples.unwrap_or(d.resamples),
            seed: self.numeric_seed.unwrap_or(fallback_seed),
        }
    }
}

fn positive_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be a positive number of seconds".into())
    }
}

/// A failed command: message for standard error and the exit code.
struct Failure(u8, String);

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure(EXIT_INVALID_INPUT, msg.into())
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read_file(path: &Path) -> Result<ParsedFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let code = match e.kind() {
            ErrorKind::NotFound | ErrorKind::PermissionDenied => EXIT_NO_INPUT,
            _ => EXIT_IO,
        };
        Failure(code, format!("{}: {e}", path.display()))
    })?;
    parse_dsl(&text).map_err(|e| {
        let code = match e.kind {
            DslErrorKind::Degenerate => EXIT_DEGENERATE,
            _ => EXIT_INVALID_INPUT,
        };
        Failure(code, format!("{}: {e}", path.display()))
    })
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Discover {
            file,
            target,
            prover,
            numeric,
            json,
            hide,
            no_timings,
            brute_force,
        } => {
            let mut parsed = read_file(&file)?;
            hide_points(&mut parsed.construction, &hide).map_err(Failure::input)?;
            let c = &parsed.construction;
            let target = match target {
                Some(name) => c
                    .find(&name)
                    .ok_or_else(|| Failure::input(format!("unknown point `{name}`")))?,
                None => parsed
                    .target()
                    .ok_or_else(|| Failure::input("no target: pass --target or add a `discover` line"))?,
            };
            let config = DiscoveryConfig {
                numeric: numeric.config(prover.seed),
                timeout: Duration::from_secs_f64(prover.timeout),
                pin: prover.pin,
                pruning: !brute_force,
                timings: !no_timings,
                ..DiscoveryConfig::default()
            };
            let report = discover(c, target, &config).map_err(|e| match e {
                DiscoveryError::DegenerateConstruction(_) => Failure(EXIT_DEGENERATE, e.to_string()),
                DiscoveryError::UnknownTarget(_) => Failure::input(e.to_string()),
                _ => Failure(EXIT_INTERNAL, e.to_string()),
            })?;
            if json {
                emit(&(report.to_json() + "\n"));
            } else if report.halted {
                eprint!("{}", report.to_text());
            } else {
                emit(&report.to_text());
            }
            Ok(if report.halted { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Command::Prove {
            file,
            statement,
            prover,
            json,
        } => {
            let parsed = read_file(&file)?;
            let c = &parsed.construction;
            let stmt = parse_statement(c, &statement.join(" ")).map_err(Failure::input)?;
            let t = algebraize_construction(c).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
            let config = ProverConfig {
                timeout: Duration::from_secs_f64(prover.timeout),
                pin: prover.pin,
                seed: prover.seed,
                cancel: None,
            };
            let verdict = decide_statement(c, &t, &stmt, &config);
            if json {
                emit(&(serde_json::to_string_pretty(&verdict).expect("verdict serializes") + "\n"));
            } else {
                emit(&verdict_text(&stmt.describe(|p| c.name(p).to_string()), &verdict));
            }
            Ok(match verdict.verdict {
                Verdict::Proved => EXIT_OK,
                Verdict::Refuted => EXIT_REFUTED,
                Verdict::Unknown => EXIT_UNKNOWN,
            })
        }
        Command::Check {
            file,
            statement,
            numeric,
        } => {
            let parsed = read_file(&file)?;
            let c = &parsed.construction;
            let stmt = parse_statement(c, &statement.join(" ")).map_err(Failure::input)?;
            let samples = NumericSamples::new(c, &numeric.config(0))
                .map_err(|e| Failure(EXIT_DEGENERATE, e.to_string()))?;
            let holds = samples.check(&stmt);
            let name = stmt.describe(|p| c.name(p).to_string());
            emit(&format!(
                "{name}: {} on {} instances\n",
                if holds { "holds" } else { "fails" },
                samples.instances().len()
            ));
            Ok(if holds { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::DumpIdeal { file, statement } => {
            let parsed = read_file(&file)?;
            let c = &parsed.construction;
            let t = algebraize_construction(c).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
            let mut out = t.dump();
            if let Some(text) = statement {
                let stmt = parse_statement(c, &text).map_err(Failure::input)?;
                let theses = algebraize_statement(&stmt, &t).map_err(|e| Failure::input(e.to_string()))?;
                out.push_str("theses:\n");
                for p in theses {
                    out.push_str(&format!("  {}\n", p.to_string_with(&t.variables)));
                }
            }
            emit(&out);
            Ok(EXIT_OK)
        }
        Command::Serve { port, bind, wall_cap } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure(EXIT_IO, e.to_string()))?;
            let state = server::AppState {
                wall_cap: Duration::from_secs_f64(wall_cap),
            };
            runtime
                .block_on(server::serve(&format!("{bind}:{port}"), state))
                .map_err(|e| Failure(EXIT_IO, e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}

/// Writes to standard output; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn verdict_text(statement: &str, v: &ProofVerdict) -> String {
    let verdict = match (v.verdict, v.reason) {
        (Verdict::Unknown, Some(reason)) => format!("unknown ({reason:?})"),
        (verdict, _) => format!("{verdict:?}"),
    };
    let mut out = format!("{statement}: {}\n", verdict.to_lowercase());
    for cert in &v.certificates {
        out.push_str("  ");
        out.push_str(&certificate_text(cert));
        out.push('\n');
    }
    out
}

fn certificate_text(cert: &Certificate) -> String {
    match cert {
        Certificate::Substitution => "holds after substituting the constructed points".into(),
        Certificate::NonDegeneracy {
            condition,
            basis_size,
        } => {
            format!("holds where {condition} != 0 (basis of {basis_size} polynomials)")
        }
        Certificate::Counterexample { coordinates, value } => {
            let pts: Vec<String> = coordinates
                .iter()
                .map(|(n, x, y)| format!("{n}=({x}, {y})"))
                .collect();
            format!("counterexample {} gives thesis value {value}", pts.join(" "))
        }
        Certificate::EliminationIdealZero { basis_size } => {
            format!("no non-degeneracy condition exists (basis of {basis_size} polynomials)")
        }
        Certificate::PseudoRemainder { initials } => format!(
            "pseudo-remainder zero; holds where {} initial(s) do not vanish",
            initials.len()
        ),
    }
}
