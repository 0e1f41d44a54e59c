//! Command-line front end for the verification suites.
//!
//! `run_cli` takes the full argument vector and returns the exit code
//! together with the text written to each stream, so it can be tested
//! without spawning a process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ckfock::carrier::Carrier;
use ckfock::graph::{DirectedGraph, GraphError};
use ckfock::kgraph::{KGraph, KGraphError};
use ckfock::poly::{random_family, NcPolynomial};
use ckfock::verify::{
    check_ck_defects, check_commutant_shift, check_gauge, check_hrlemma, check_identify,
    check_tck, generator_sum, CheckReport, Params, Suite, VerifyError,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_UNREADABLE: i32 = 4;

/// Random polynomials drawn per suite that takes a polynomial family.
const FAMILY_SIZE: usize = 8;
const FAMILY_DEGREE: usize = 3;

#[derive(Parser, Debug)]
#[command(name = "ckfock", version, about = "Run relation and norm checks on graph carriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one suite, or all applicable suites, on a carrier file.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["graph", "kgraph"])))]
struct CheckArgs {
    /// Directed graph file.
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Higher-rank graph file.
    #[arg(long, value_name = "FILE")]
    kgraph: Option<PathBuf>,
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Truncation level.
    #[arg(long = "N", value_name = "INT")]
    n: usize,
    /// Tail depth of the Γ space.
    #[arg(long = "M", value_name = "INT", default_value_t = 0)]
    m: usize,
    /// Depth of added tails; defaults to N.
    #[arg(long = "T", value_name = "INT")]
    t: Option<usize>,
    /// Shift length; defaults to 1.
    #[arg(long = "d", value_name = "INT")]
    d: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    Tck,
    Ck,
    Shift,
    Identify,
    Hrlemma,
    Gauge,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Lines,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph { path: String, source: GraphError },
    #[error("{path}: {source}")]
    KGraph { path: String, source: KGraphError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unreadable { .. } => EXIT_UNREADABLE,
            CliError::Graph { .. } | CliError::KGraph { .. } => EXIT_PARSE,
            CliError::Usage(_) | CliError::Verify(_) => EXIT_USAGE,
        }
    }
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Input {
    Graph(DirectedGraph),
    KGraph(KGraph),
}

impl Input {
    fn carrier(&self) -> Carrier {
        match self {
            Input::Graph(g) => Carrier::from(g.clone()),
            Input::KGraph(kg) => Carrier::from(kg.clone()),
        }
    }
}

/// Carrier name shown in reports: the upper-cased file stem.
fn carrier_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().to_uppercase())
        .unwrap_or_else(|| "CARRIER".to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Unreadable {
        path: path.display().to_string(),
        source,
    })
}

fn load(args: &CheckArgs) -> Result<(String, Input), CliError> {
    if let Some(path) = &args.graph {
        let g = DirectedGraph::parse(&read(path)?).map_err(|source| CliError::Graph {
            path: path.display().to_string(),
            source,
        })?;
        Ok((carrier_name(path), Input::Graph(g)))
    } else if let Some(path) = &args.kgraph {
        let kg = KGraph::parse(&read(path)?).map_err(|source| CliError::KGraph {
            path: path.display().to_string(),
            source,
        })?;
        Ok((carrier_name(path), Input::KGraph(kg)))
    } else {
        Err(CliError::Usage("one of --graph or --kgraph is required".into()))
    }
}

fn suites(arg: SuiteArg, input: &Input) -> Vec<Suite> {
    let one = match arg {
        SuiteArg::Tck => Suite::Tck,
        SuiteArg::Ck => Suite::Ck,
        SuiteArg::Shift => Suite::Shift,
        SuiteArg::Identify => Suite::Identify,
        SuiteArg::Hrlemma => Suite::Hrlemma,
        SuiteArg::Gauge => Suite::Gauge,
        SuiteArg::All => {
            return Suite::ALL
                .iter()
                .copied()
                .filter(|s| applicable(*s, input))
                .collect()
        }
    };
    vec![one]
}

/// Whether `all` should include the suite for this input.
fn applicable(suite: Suite, input: &Input) -> bool {
    match (suite, input) {
        (Suite::Shift | Suite::Hrlemma, Input::Graph(g)) => !g.has_sources(),
        (Suite::Shift | Suite::Identify, Input::KGraph(_)) => false,
        _ => true,
    }
}

fn family(carrier: &Carrier, params: &Params) -> Vec<NcPolynomial> {
    random_family(carrier, FAMILY_SIZE, FAMILY_DEGREE.min(params.n), params.seed)
}

fn run_suite(
    suite: Suite,
    name: &str,
    input: &Input,
    params: Params,
) -> Result<Vec<CheckReport>, CliError> {
    let carrier = input.carrier();
    let graph = || match input {
        Input::Graph(g) => Ok(g),
        Input::KGraph(_) => Err(VerifyError::WrongCarrier {
            suite,
            expected: "1-graph",
        }),
    };
    let reports = match suite {
        Suite::Tck => check_tck(&carrier, name, params)?,
        Suite::Ck => check_ck_defects(&carrier, name, params)?,
        Suite::Shift => check_commutant_shift(graph()?, name, &family(&carrier, &params), params)?,
        Suite::Identify => check_identify(graph()?, name, &family(&carrier, &params), params)?,
        Suite::Hrlemma => {
            let kg = match input {
                Input::Graph(g) if g.has_sources() => {
                    return Err(VerifyError::HasSources {
                        suite,
                        carrier: name.to_string(),
                    }
                    .into())
                }
                Input::Graph(g) => KGraph::from_graph(g).map_err(VerifyError::from)?,
                Input::KGraph(kg) => kg.clone(),
            };
            let mut polys = vec![generator_sum(&carrier)];
            polys.extend(random_family(&carrier, 4, FAMILY_DEGREE.min(params.n), params.seed));
            check_hrlemma(&kg, name, &polys, params)?
        }
        Suite::Gauge => {
            let samples = match input {
                Input::Graph(_) => 8,
                Input::KGraph(_) => 4,
            };
            check_gauge(&carrier, name, params, samples)?
        }
    };
    Ok(reports)
}

fn check(args: CheckArgs, out: &mut String) -> Result<bool, CliError> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let (name, input) = load(&args)?;
    let mut params = Params::new(args.n)
        .with_m(args.m)
        .with_tol(args.tol)
        .with_seed(args.seed);
    params.t = args.t;
    params.d = args.d;
    let mut all_pass = true;
    let mut total = 0;
    let mut failed = 0;
    for suite in suites(args.suite, &input) {
        for r in run_suite(suite, &name, &input, params)? {
            total += 1;
            if !r.pass {
                failed += 1;
                all_pass = false;
            }
            let line = match args.format {
                Format::Text => r.text(),
                Format::Lines => r.line(),
            };
            writeln!(out, "{line}").unwrap();
        }
    }
    if args.format == Format::Text {
        writeln!(out, "{total} checks, {failed} failed").unwrap();
    }
    Ok(all_pass)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = String::new();
    let mut stderr = String::new();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                stderr = rendered;
            } else {
                stdout = rendered;
            }
            return Outcome { code, stdout, stderr };
        }
    };
    let code = match cli.command {
        Command::Check(args) => match check(args, &mut stdout) {
            Ok(true) => EXIT_PASS,
            Ok(false) => EXIT_FAIL,
            Err(e) => {
                writeln!(stderr, "error: {e}").unwrap();
                e.exit_code()
            }
        },
    };
    Outcome { code, stdout, stderr }
}
