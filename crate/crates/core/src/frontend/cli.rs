use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::{
    parse, parse_fun_id, parse_value, print_config, print_redex, print_result, ParseError,
    SourceUnit,
};
use crate::ast::{Expr, FunId, Name, Value, Var};
use crate::equiv::{ciu_equiv, EquivConfig, EquivError, Verdict, VerdictReport};
use crate::machine::{eval_star, eval_traced, Configuration, Redex, RunOutcome};
use crate::props;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "cerl",
    version,
    about = "Run and compare sequential Core Erlang programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a program and print its result.
    Run {
        file: PathBuf,
        /// Argument passed to the entry function; repeat for more.
        #[arg(long = "arg")]
        args: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: usize,
        /// Entry function as name/arity; defaults to the last definition.
        #[arg(long)]
        entry: Option<String>,
    },
    /// Print every reduction step.
    Trace {
        file: PathBuf,
        #[arg(long = "arg")]
        args: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: usize,
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare two programs for CIU equivalence and print a JSON report.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        /// Comma-separated free names: variables, or functions as name/arity.
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        stacks: Option<usize>,
        #[arg(long)]
        substs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        entry: Option<String>,
    },
    /// Run the built-in property checks.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Suite {
    Props,
    Golden,
    All,
}

enum Failure {
    Usage(String),
    Parse(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) => m,
        }
    }
}

fn load(path: &Path) -> Result<SourceUnit, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e: ParseError| Failure::Parse(format!("{}: {e}", path.display())))
}

fn entry_id(entry: &Option<String>) -> Result<Option<FunId>, Failure> {
    entry
        .as_deref()
        .map(|text| {
            parse_fun_id(text)
                .ok_or_else(|| Failure::Usage(format!("bad entry {text:?}, expected name/arity")))
        })
        .transpose()
}

fn program(file: &Path, args: &[String], entry: &Option<String>) -> Result<Expr, Failure> {
    let unit = load(file)?;
    let values = args
        .iter()
        .map(|a| parse_value(a).map_err(|e| Failure::Parse(format!("argument {a:?}: {e}"))))
        .collect::<Result<Vec<Value>, _>>()?;
    unit.applied_to(entry_id(entry)?.as_ref(), &values)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn write_outcome(outcome: &RunOutcome, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match outcome {
        RunOutcome::Completed { result, .. } => {
            let _ = writeln!(out, "{}", print_result(result));
            0
        }
        RunOutcome::OutOfFuel(c) => {
            let _ = writeln!(err, "out of fuel at {}", print_config(c));
            2
        }
        RunOutcome::Stuck { reason, config } => {
            let _ = writeln!(err, "stuck: {reason}\n  at {}", print_config(config));
            3
        }
    }
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    step: usize,
    rule: Option<&'a str>,
    stack_depth: usize,
    redex_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome: Option<&'a str>,
}

fn trace(expr: Expr, fuel: usize, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (outcome, steps) = eval_traced(Configuration::initial(expr), fuel);
    let last = match &outcome {
        RunOutcome::Completed { result, .. } => {
            (Redex::from_result(result.clone()), 0, "completed")
        }
        RunOutcome::OutOfFuel(c) => (c.redex.clone(), c.stack.len(), "out_of_fuel"),
        RunOutcome::Stuck { config, .. } => (config.redex.clone(), config.stack.len(), "stuck"),
    };
    for s in &steps {
        let _ = match format {
            Format::Text => writeln!(
                out,
                "{:>5}  {:<12} {:>3}  {}",
                s.index,
                s.rule.name(),
                s.before.stack.len(),
                print_redex(&s.before.redex)
            ),
            Format::Json => writeln!(
                out,
                "{}",
                serde_json::to_string(&TraceRecord {
                    step: s.index,
                    rule: Some(s.rule.name()),
                    stack_depth: s.before.stack.len(),
                    redex_text: print_redex(&s.before.redex),
                    outcome: None,
                })
                .expect("records serialize")
            ),
        };
    }
    if format == Format::Json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&TraceRecord {
                step: steps.len(),
                rule: None,
                stack_depth: last.1,
                redex_text: print_redex(&last.0),
                outcome: Some(last.2),
            })
            .expect("records serialize")
        );
        return match outcome {
            RunOutcome::Completed { .. } => 0,
            RunOutcome::OutOfFuel(_) => 2,
            RunOutcome::Stuck { .. } => 3,
        };
    }
    write_outcome(&outcome, out, err)
}

fn free_name(text: &str) -> Result<Name, Failure> {
    let text = text.trim();
    if text.contains('/') {
        return parse_fun_id(text)
            .map(Name::FunId)
            .ok_or_else(|| Failure::Usage(format!("bad free name {text:?}")));
    }
    let starts_ok = text
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_uppercase() || c == '_');
    if starts_ok
        && text
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '@')
    {
        Ok(Name::Var(Var::new(text)))
    } else {
        Err(Failure::Usage(format!("bad free name {text:?}")))
    }
}

/// A module's entry applied to fresh parameter variables, which become
/// free names; a bare expression as written.
fn comparable(
    unit: &SourceUnit,
    entry: Option<&FunId>,
    gamma: &mut BTreeSet<Name>,
) -> Result<Expr, Failure> {
    let arity = match (unit, entry) {
        (SourceUnit::Expr(e), _) => return Ok(e.clone()),
        (SourceUnit::Module(_), Some(f)) => f.arity,
        (SourceUnit::Module(defs), None) => defs.last().map_or(0, |d| d.def.id.arity),
    };
    let params: Vec<Var> = (1..=arity).map(|i| Var::new(format!("_Arg{i}"))).collect();
    gamma.extend(params.iter().cloned().map(Name::Var));

    unit.applied_to(
        entry,
        &params.into_iter().map(Value::Var).collect::<Vec<_>>(),
    )
    .map_err(|e| Failure::Usage(e.to_string()))
}

fn equiv(
    left: &Path,
    right: &Path,
    free: &[String],
    cfg: EquivConfig,
    entry: &Option<String>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let entry = entry_id(entry)?;
    let (l, r) = (load(left)?, load(right)?);
    let mut gamma = free
        .iter()
        .map(|n| free_name(n))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let l = comparable(&l, entry.as_ref(), &mut gamma)?;
    let r = comparable(&r, entry.as_ref(), &mut gamma)?;
    let verdict =
        ciu_equiv(&Redex::Expr(l), &Redex::Expr(r), &gamma, &cfg).map_err(|e| match e {
            EquivError::OutOfScope(_) => Failure::Usage(format!("{e}; list them with --free")),
            EquivError::InvalidConfig(_) => Failure::Usage(e.to_string()),
        })?;
    let _ = writeln!(out, "{}", VerdictReport::new(&verdict, &cfg).to_json());
    Ok(match verdict {
        Verdict::Equivalent { .. } => 0,
        Verdict::Inequivalent { .. } => 1,
        Verdict::Unknown { .. } => 2,
    })
}

fn check(suite: Suite, out: &mut dyn Write) -> i32 {
    let mut reports = Vec::new();
    if matches!(suite, Suite::Golden | Suite::All) {
        reports.push(props::golden());
    }
    if matches!(suite, Suite::Props | Suite::All) {
        reports.extend(props::property_suite());
    }
    let mut ok = true;
    for r in &reports {
        ok &= r.passed();
        let _ = writeln!(
            out,
            "{} {}: {} checked, {} failed, {} unknown",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.checked,
            r.failed,
            r.unknown
        );
        for e in &r.examples {
            let _ = writeln!(out, "    {e}");
        }
    }
    if ok {
        0
    } else {
        1
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Run {
            file,
            args,
            fuel,
            entry,
        } => {
            let expr = program(&file, &args, &entry)?;
            let outcome = eval_star(Configuration::initial(expr), fuel);
            Ok(write_outcome(&outcome, out, err))
        }
        Command::Trace {
            file,
            args,
            fuel,
            entry,
            format,
        } => {
            let expr = program(&file, &args, &entry)?;
            Ok(trace(expr, fuel, format, out, err))
        }
        Command::Equiv {
            left,
            right,
            free,
            fuel,
            stacks,
            substs,
            seed,
            entry,
        } => {
            let defaults = EquivConfig::default();
            let cfg = EquivConfig {
                fuel: fuel.unwrap_or(defaults.fuel),
                num_stacks: stacks.unwrap_or(defaults.num_stacks),
                num_substitutions: substs.unwrap_or(defaults.num_substitutions),
                seed: seed.unwrap_or(defaults.seed),
                ..defaults
            };
            equiv(&left, &right, &free, cfg, &entry, out)
        }
        Command::Check { suite } => Ok(check(suite, out)),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}
