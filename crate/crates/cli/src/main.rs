use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hlv_core::formula::{classify, parse_body, parse_formula, QuantifiedFormula};
use hlv_core::modelcheck::{check, CheckError};
use hlv_core::monitor::{run_stream, Monitor, MonitorOptions};
use hlv_core::satcheck::{sat_bounded, sat_exists, sat_exists_forall, sat_forall, SatError, SatResult, SatStatus};
use hlv_core::speclib::{self, parse_architecture};
use hlv_core::{parse_kripke, Limits, Strategy, TraceVariable};

const HOLDS: u8 = 0;
const VIOLATED: u8 = 1;
const UNKNOWN: u8 = 2;
const ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "hlv", version, about = "HyperLTL parsing, model checking, satisfiability and monitoring")]
struct Cli {
    /// Output style: prose, or one `key=value` record per line.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Lines,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and report its fragment.
    Parse(FormulaArg),
    /// Model check a formula against a Kripke structure.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        /// Defaults to selfcomp for alternation-free formulas, inclusion for
        /// forall-exists, basic otherwise.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Decide satisfiability or search for a small model.
    Sat {
        #[command(flatten)]
        formula: FormulaArg,
        /// Defaults to fragment when the prefix allows it, bounded otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_traces: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        max_stem: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        max_loop: u64,
        #[command(flatten)]
        caps: Caps,
    },
    /// Monitor an event stream against a universal safety formula.
    Monitor {
        #[command(flatten)]
        formula: FormulaArg,
        /// Event stream; standard input when omitted.
        #[arg(long)]
        stream: Option<PathBuf>,
        /// Track one tuple per multiset of traces when the body is symmetric.
        #[arg(long)]
        symmetry: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Print a generated specification.
    Gen {
        #[command(subcommand)]
        spec: Spec,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormulaArg {
    /// File holding the formula.
    #[arg(long)]
    formula: Option<PathBuf>,
    /// The formula itself.
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,
}

#[derive(Args)]
struct Caps {
    #[arg(long, default_value_t = Limits::default().max_states)]
    max_states: usize,
    #[arg(long, default_value_t = Limits::default().max_candidates)]
    max_candidates: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits {
            max_states: self.max_states,
            max_candidates: self.max_candidates,
            ..Limits::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Basic,
    Selfcomp,
    Inclusion,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fragment,
    Bounded,
}

#[derive(Subcommand)]
enum Spec {
    /// Observational determinism.
    Obsdet {
        #[arg(long, value_delimiter = ',', required = true)]
        low: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        obs: Vec<String>,
    },
    /// Noninference.
    Noninference {
        #[arg(long, value_delimiter = ',', required = true)]
        high: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        low: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        obs: Vec<String>,
    },
    /// Generalized noninterference.
    Gni {
        #[arg(long, value_delimiter = ',', required = true)]
        high: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        low: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        obs: Vec<String>,
    },
    /// Minimum Hamming distance between outputs of traces with different inputs.
    Hamming {
        #[arg(long)]
        distance: usize,
        #[arg(long)]
        input: String,
        #[arg(long)]
        output: String,
    },
    /// Outputs depend only on the given inputs, as a body over `p` and `p'`.
    Dependence {
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        outputs: Vec<String>,
    },
    /// Distributed realizability encoding of a specification.
    Distributed {
        #[arg(long)]
        arch: PathBuf,
        /// Body over a single trace variable.
        #[arg(long)]
        spec: String,
    },
}

/// A failure reported on standard error with exit code 3.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR } else { HOLDS });
        }
    };
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_formula(arg: &FormulaArg) -> Result<QuantifiedFormula, Failure> {
    let text = match (&arg.formula, &arg.expr) {
        (Some(path), _) => read(path)?,
        (None, Some(expr)) => expr.clone(),
        (None, None) => unreachable!("clap requires one of the two"),
    };
    Ok(parse_formula(&text)?)
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let lines = cli.format == Format::Lines;
    match &cli.command {
        Command::Parse(arg) => {
            let f = load_formula(arg)?;
            let info = classify(&f);
            let summary = format!(
                "pattern={} alternation={} safety={}",
                info.pattern,
                info.alternations,
                if info.syntactic_safety_body { "yes" } else { "no" }
            );
            if lines {
                writeln!(out, "parse {summary} formula=\"{f}\"")?;
            } else {
                writeln!(out, "{f}")?;
                writeln!(out, "{summary}")?;
            }
            Ok(HOLDS)
        }
        Command::Check {
            model,
            formula,
            strategy,
            caps,
        } => {
            let k = parse_kripke(&read(model)?)?;
            let f = load_formula(formula)?;
            let strategy = match strategy {
                None => Strategy::default_for(&f),
                Some(StrategyArg::Basic) => Strategy::Basic,
                Some(StrategyArg::Selfcomp) => Strategy::SelfComposition,
                Some(StrategyArg::Inclusion) => Strategy::Inclusion,
            };
            match check(&k, &f, strategy, &caps.limits()) {
                Ok(v) => {
                    let result = if v.holds { "holds" } else { "violated" };
                    let label = if v.holds { "witness" } else { "counterexample" };
                    if lines {
                        write!(out, "check result={result} strategy={}", v.strategy)?;
                        if let Some(w) = &v.witness {
                            write!(out, " {label}=\"{w}\"")?;
                        }
                        writeln!(out)?;
                    } else {
                        writeln!(out, "{result} (strategy {})", v.strategy)?;
                        if let Some(w) = &v.witness {
                            writeln!(out, "{label}:")?;
                            for (var, t) in w.iter() {
                                writeln!(out, "  {var} -> {t}")?;
                            }
                        }
                    }
                    Ok(if v.holds { HOLDS } else { VIOLATED })
                }
                Err(CheckError::ResourceLimit(r)) => {
                    report_unknown(out, lines, "check", &r.to_string())?;
                    Ok(UNKNOWN)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Sat {
            formula,
            method,
            max_traces,
            max_stem,
            max_loop,
            caps,
        } => {
            let f = load_formula(formula)?;
            let info = classify(&f);
            let limits = caps.limits();
            let fragment = info.exists_only || info.forall_only || info.exists_forall;
            let method = method.unwrap_or(if fragment { Method::Fragment } else { Method::Bounded });
            let result = match method {
                Method::Fragment if info.exists_only => sat_exists(&f, &limits),
                Method::Fragment if info.forall_only => sat_forall(&f, &limits),
                Method::Fragment if info.exists_forall => sat_exists_forall(&f, &limits),
                Method::Fragment => {
                    return Err(Failure(format!(
                        "no decision procedure for prefix `{}`; use --method bounded",
                        info.pattern
                    )))
                }
                Method::Bounded => sat_bounded(&f, *max_traces as usize, *max_stem as usize, *max_loop as usize, &limits),
            };
            match result {
                Ok(r) => {
                    print_sat(out, lines, &r)?;
                    Ok(match r.status {
                        SatStatus::Sat => HOLDS,
                        SatStatus::Unsat => VIOLATED,
                        SatStatus::Unknown => UNKNOWN,
                    })
                }
                Err(SatError::ResourceLimit(r)) => {
                    report_unknown(out, lines, "sat", &r.to_string())?;
                    Ok(UNKNOWN)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Monitor {
            formula,
            stream,
            symmetry,
            caps,
        } => {
            let f = load_formula(formula)?;
            let mut monitor = Monitor::new(&f, MonitorOptions { symmetry: *symmetry }, &caps.limits())?;
            let input: Box<dyn BufRead> = match stream {
                Some(path) => Box::new(BufReader::new(
                    fs::File::open(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
                )),
                None => Box::new(io::stdin().lock()),
            };
            let mut write_err = None;
            let result = run_stream(&mut monitor, input, |v| {
                if write_err.is_none() {
                    if let Err(e) = writeln!(out, "{v}").and_then(|_| out.flush()) {
                        write_err = Some(e);
                    }
                }
            });
            if let Some(e) = write_err {
                return Err(e.into());
            }
            result?;
            let traces = monitor.traces().len();
            let violations = monitor.violations().len();
            if lines {
                writeln!(out, "monitor traces={traces} violations={violations}")?;
            } else if violations == 0 {
                writeln!(out, "no violation in {traces} traces")?;
            } else {
                writeln!(out, "{violations} violating tuples in {traces} traces")?;
            }
            Ok(if violations == 0 { HOLDS } else { VIOLATED })
        }
        Command::Gen { spec } => {
            let text = match spec {
                Spec::Obsdet { low, obs } => speclib::gen_obsdet(low, obs)?.to_string(),
                Spec::Noninference { high, low, obs } => speclib::gen_noninference(high, low, obs)?.to_string(),
                Spec::Gni { high, low, obs } => speclib::gen_gni(high, low, obs)?.to_string(),
                Spec::Hamming {
                    distance,
                    input,
                    output,
                } => speclib::gen_hamming(*distance, input, output)?.to_string(),
                Spec::Dependence { inputs, outputs } => {
                    let (p, q) = (TraceVariable::new("p")?, TraceVariable::new("p'")?);
                    speclib::gen_dependence(inputs, outputs, &p, &q)?.to_string()
                }
                Spec::Distributed { arch, spec } => {
                    let arch = parse_architecture(&read(arch)?)?;
                    speclib::gen_distributed(&arch, &parse_body(spec)?)?.to_string()
                }
            };
            writeln!(out, "{text}")?;
            Ok(HOLDS)
        }
    }
}

fn report_unknown(out: &mut impl Write, lines: bool, what: &str, reason: &str) -> io::Result<()> {
    if lines {
        writeln!(out, "{what} result=unknown reason=\"{reason}\"")
    } else {
        writeln!(out, "unknown: {reason}")
    }
}

fn print_sat(out: &mut impl Write, lines: bool, r: &SatResult) -> io::Result<()> {
    let model: Vec<String> = r.model.iter().flatten().map(|t| t.to_string()).collect();
    if lines {
        write!(out, "sat result={} note=\"{}\"", r.status, r.note)?;
        if r.model.is_some() {
            write!(out, " model=\"{}\"", model.join(", "))?;
        }
        writeln!(out)
    } else {
        writeln!(out, "{} ({})", r.status, r.note)?;
        if r.model.is_some() {
            writeln!(out, "model:")?;
            for t in model {
                writeln!(out, "  {t}")?;
            }
        }
        Ok(())
    }
}
