use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use egc::fibration::parse_divisor;
use egc::reference::{run_table, ReferenceError, TABLE_NAMES};
use egc::trace::{render_dot, render_json, render_text};
use egc::{Engine, EngineError, Incidence, Options, Problem, SlotOrder, Tangency, ZProblem};

#[derive(Parser)]
#[command(name = "egc", version, about = "Exact counts of rational and elliptic curves in projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Args)]
struct EngineFlags {
    /// Load memoized counts from this file before running and save them after.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// Degenerate hyperplane incidences instead of stripping them.
    #[arg(long, global = true)]
    no_divisor_axiom: bool,
    /// Evaluate every admissible slot at every node and require agreement.
    #[arg(long, global = true)]
    check_all_orders: bool,
    #[arg(long, global = true, value_enum, default_value_t = Order::MaxE)]
    degeneration_order: Order,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    MaxE,
    MinE,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct Conditions {
    /// Incidences `e:count`: marked points on general e-planes.
    #[arg(long = "incidence", value_name = "E:COUNT")]
    incidences: Vec<String>,
    /// Shorthand for `--incidence 0:K`.
    #[arg(long)]
    points: Option<u32>,
    /// Shorthand for `--incidence 1:K`.
    #[arg(long)]
    lines: Option<u32>,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(short = 'g', long, default_value_t = 0)]
    genus: u32,
    #[arg(short = 'n', long)]
    n: u32,
    #[arg(short = 'd', long)]
    d: u32,
    /// Contacts with H `m,e:count`: order m on a general e-plane of H.
    #[arg(long = "tangency", value_name = "M,E:COUNT")]
    tangencies: Vec<String>,
    #[command(flatten)]
    conditions: Conditions,
}

#[derive(Subcommand)]
enum Command {
    /// Count curves satisfying the conditions.
    Count {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Divide by the number of orderings of equal contact conditions.
        #[arg(long)]
        unmarked: bool,
    },
    /// Count elliptic curves with a linear equivalence among marked points.
    Zcount {
        #[arg(short = 'n', long)]
        n: u32,
        #[arg(short = 'd', long)]
        d: u32,
        #[command(flatten)]
        conditions: Conditions,
        /// e.g. `p1+p2+p3+p4`, `2*l1+p1`, `q0.1-q1.2+...`
        #[arg(long)]
        divisor: String,
    },
    /// Print the expected dimension of the problem.
    Dim {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Recompute a table of published values.
    Table {
        #[arg(value_name = "NAME")]
        name: String,
    },
    /// Print the degeneration tree of a count.
    Trace {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Stop expanding below this many levels.
        #[arg(long)]
        max_depth: Option<usize>,
    },
}

enum Failure {
    Invalid(String),
    Unsupported(String),
    Other(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Unsupported(_) => Failure::Unsupported(e.to_string()),
            EngineError::Invalid(_) | EngineError::InvalidDivisor(_) | EngineError::NoSlot(_) => {
                Failure::Invalid(e.to_string())
            }
            other => Failure::Other(other.to_string()),
        }
    }
}

fn invalid(msg: impl ToString) -> Failure {
    Failure::Invalid(msg.to_string())
}

fn incidence(c: &Conditions) -> Result<Incidence, Failure> {
    let mut i = Incidence::new();
    for text in &c.incidences {
        i = i.plus(&text.parse().map_err(|e: egc::problem::ParseError| invalid(e.0))?);
    }
    if let Some(k) = c.points {
        i.add(0, k);
    }
    if let Some(k) = c.lines {
        i.add(1, k);
    }
    Ok(i)
}

fn problem(a: &ProblemArgs) -> Result<Problem, Failure> {
    let mut h = Tangency::new();
    for text in &a.tangencies {
        h = h.plus(&text.parse().map_err(|e: egc::problem::ParseError| invalid(e.0))?);
    }
    let p = Problem::new(a.genus, a.n, a.d, h, incidence(&a.conditions)?);
    Engine::check(&p)?;
    Ok(p)
}

fn engine(flags: &EngineFlags) -> Result<Engine, Failure> {
    let e = Engine::new(Options {
        divisor_axiom: !flags.no_divisor_axiom,
        order: match flags.degeneration_order {
            Order::MaxE => SlotOrder::MaxE,
            Order::MinE => SlotOrder::MinE,
        },
        check_all_orders: flags.check_all_orders,
    });
    if let Some(path) = &flags.cache {
        if path.exists() {
            e.memo().load(path).map_err(|err| invalid(format!("cache: {err}")))?;
        }
    }
    Ok(e)
}

fn plain(flags: &EngineFlags, problem: &str, count: &str) -> Result<String, Failure> {
    match flags.format {
        Format::Text => Ok(count.to_string()),
        Format::Json => Ok(serde_json::json!({ "problem": problem, "count": count }).to_string()),
        Format::Dot => Err(invalid("dot output is only available for trace")),
    }
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let flags = &cli.engine;
    let eng = engine(flags)?;
    let (out, ok) = match &cli.command {
        Command::Count { problem: args, unmarked } => {
            let p = problem(args)?;
            let mut v = eng.count(&p)?;
            if *unmarked {
                let m = p.marking_factor();
                if !(&v % &m).is_zero() {
                    return Err(Failure::Other(format!("{v} is not divisible by the marking factor {m}")));
                }
                v /= m;
            }
            (plain(flags, &p.to_string(), &v.to_string())?, true)
        }
        Command::Zcount { n, d, conditions, divisor } => {
            let terms = parse_divisor(divisor).map_err(|e| invalid(e.0))?;
            let z = ZProblem::from_terms(*n, *d, incidence(conditions)?, &terms)?;
            let v = eng.count_z(&z)?;
            (plain(flags, &z.to_string(), &v.to_string())?, true)
        }
        Command::Dim { problem: args } => {
            let p = problem(args)?;
            (plain(flags, &p.to_string(), &p.dim().to_string())?, true)
        }
        Command::Table { name } => {
            let t = run_table(&eng, name).map_err(|e| match e {
                ReferenceError::UnknownTable(_) => invalid(e),
                ReferenceError::Engine(err) => err.into(),
            })?;
            if flags.format != Format::Text {
                return Err(invalid("tables are printed as text"));
            }
            (t.to_string().trim_end().to_string(), t.all_ok())
        }
        Command::Trace { problem: args, max_depth } => {
            let p = problem(args)?;
            let t = eng.trace(&p, *max_depth)?;
            let out = match flags.format {
                Format::Text => render_text(&t),
                Format::Json => render_json(&t),
                Format::Dot => render_dot(&t),
            };
            (out.trim_end().to_string(), true)
        }
    };
    if let Some(path) = &flags.cache {
        eng.memo().save(path).map_err(|err| Failure::Other(format!("cache: {err}")))?;
    }
    Ok((out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            // a closed pipe downstream is not an error
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            if let Command::Table { .. } = cli.command {
                eprintln!("tables: {}", TABLE_NAMES.join(", "));
            }
            ExitCode::from(2)
        }
        Err(Failure::Unsupported(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
