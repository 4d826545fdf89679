//! Executable checks of the machine and equivalence properties.
//!
//! Each driver generates its own cases from a seed and returns a
//! [`CheckReport`]; the command-line `check` subcommand and the acceptance
//! tests both run them.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::ast::{EvalResult, ExcClass, Exception, Expr, Value};
use crate::corpus;
use crate::equiv::{check_values_equal_theorem, ciu_equiv, EquivConfig, TheoremReport};
use crate::frontend::{
    parse_expr, parse_pattern, parse_value, print_config, print_expr, print_pattern, print_value,
};
use crate::gen::Gen;
use crate::machine::{
    applicable_rules, eval_star, eval_traced, plug, stack_concat, step, terminates, Configuration,
    Frame, FrameStack, Redex, Rule, RunOutcome, StepOutcome, Termination,
};

const SHOWN_FAILURES: usize = 10;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub checked: usize,
    /// Cases left undecided by the fuel bound, not counted in `checked`.
    pub unknown: usize,
    pub failed: usize,
    pub examples: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            checked: 0,
            unknown: 0,
            failed: 0,
            examples: Vec::new(),
        }
    }

    fn fail(&mut self, why: impl FnOnce() -> String) {
        self.failed += 1;
        if self.examples.len() < SHOWN_FAILURES {
            self.examples.push(why());
        }
    }

    fn absorb(&mut self, outcome: Result<(), String>) {
        self.checked += 1;
        if let Err(why) = outcome {
            self.fail(|| why);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Undecided cases as a fraction of all cases tried.
    pub fn unknown_rate(&self) -> f64 {
        let total = self.checked + self.unknown;
        if total == 0 {
            0.0
        } else {
            self.unknown as f64 / total as f64
        }
    }
}

/// The rules the worked example passes through on the way to `length([])`.
pub const GOLDEN_RULES: [Rule; 10] = [
    Rule::SCase,
    Rule::SCaseSuccess,
    Rule::STry,
    Rule::SLet,
    Rule::SCallMod,
    Rule::SCallFun,
    Rule::SCallParam,
    Rule::SParams0,
    Rule::PValue,
    Rule::PParams,
];

/// After `length(0)` fails: the handler answers `'false'` and the second
/// clause is taken.
pub const GOLDEN_EXCEPTION_RULES: [Rule; 5] = [
    Rule::ExcProp,
    Rule::ExcTry,
    Rule::SCaseFalse,
    Rule::SCaseSuccess,
    Rule::PCaseTrue,
];

pub fn is_subsequence(needle: &[Rule], haystack: &[Rule]) -> bool {
    let mut rest = haystack.iter();
    needle.iter().all(|r| rest.any(|h| h == r))
}

/// Runs the guard version of the example function on `arg`.
pub fn golden_run(arg: Value) -> (RunOutcome, Vec<Rule>) {
    let program = corpus::unit(corpus::GUARD)
        .applied_to(None, &[arg])
        .expect("default entry");
    let (outcome, trace) = eval_traced(Configuration::initial(program), 10_000);
    (outcome, trace.into_iter().map(|t| t.rule).collect())
}

pub fn golden() -> CheckReport {
    let mut report = CheckReport::new("golden");
    let cases = [
        (Value::Nil, 1, &GOLDEN_RULES[..]),
        (Value::int(0), 2, &GOLDEN_EXCEPTION_RULES[..]),
    ];
    for (arg, expected, path) in cases {
        let (outcome, rules) = golden_run(arg.clone());
        let want = EvalResult::Values(vec![Value::int(expected)]);
        report.absorb(if outcome.result() != Some(&want) {
            Err(format!("f({}) gave {outcome:?}", print_value(&arg)))
        } else if !is_subsequence(path, &rules) {
            Err(format!("f({}) took {rules:?}", print_value(&arg)))
        } else {
            Ok(())
        });
    }
    report
}

fn random_exception(gen: &mut Gen) -> Exception {
    let class = [ExcClass::Error, ExcClass::Throw, ExcClass::Exit][gen.below(3)];
    Exception::new(class, gen.value(1), gen.value(1))
}

fn random_redex(gen: &mut Gen, depth: usize) -> Redex {
    match gen.below(6) {
        0..=2 => Redex::Expr(gen.closed_expr(depth)),
        3 => {
            let n = if gen.chance(0.7) { 1 } else { gen.below(3) };
            Redex::Values((0..n).map(|_| gen.value(2)).collect())
        }
        4 => Redex::Exc(random_exception(gen)),
        _ => Redex::Box,
    }
}

fn random_config(gen: &mut Gen) -> Configuration {
    let frames: Vec<Frame> = (0..gen.below(3)).map(|_| gen.frame(1)).collect();
    Configuration::new(FrameStack::from_top_first(frames), random_redex(gen, 3))
}

fn deterministic(c: &Configuration) -> Result<(), String> {
    let rules = applicable_rules(c);
    let first = step(c);
    if step(c) != first {
        return Err(format!("step is not repeatable on {}", print_config(c)));
    }
    match (&first, rules.as_slice()) {
        (StepOutcome::Stepped { rule, next }, [only]) if rule == only => {
            if next.is_closed() {
                Ok(())
            } else {
                Err(format!("{rule} opened {}", print_config(c)))
            }
        }
        (StepOutcome::Final(_) | StepOutcome::Stuck(_), []) => Ok(()),
        _ => Err(format!(
            "rules {rules:?} apply to {} but step gave {first:?}",
            print_config(c)
        )),
    }
}

/// At most one rule applies to each of `count` distinct closed
/// configurations, and to every configuration their runs pass through.
pub fn determinism(count: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("determinism");
    let mut gen = Gen::new(seed);
    let mut seen = HashSet::new();
    let mut attempts = 0;
    while seen.len() < count && attempts < count * 10 {
        attempts += 1;
        let mut c = random_config(&mut gen);
        for _ in 0..20 {
            if !seen.insert(c.clone()) {
                break;
            }
            report.absorb(deterministic(&c));
            match step(&c) {
                StepOutcome::Stepped { next, .. } => c = next,
                _ => break,
            }
        }
    }
    report
}

fn finished_config(outcome: RunOutcome) -> Option<Configuration> {
    match outcome {
        RunOutcome::OutOfFuel(c) | RunOutcome::Stuck { config: c, .. } => Some(c),
        RunOutcome::Completed { .. } => None,
    }
}

/// A run `⟨K, r⟩ →ⁿ ⟨ε, res⟩` repeats step for step on a taller stack
/// `K ++ K'` and ends in `⟨K', res⟩`.
pub fn extend_frame_stack(runs: usize, seed: u64, fuel: usize) -> CheckReport {
    let mut report = CheckReport::new("extend frame stack");
    let mut gen = Gen::new(seed);
    let mut attempts = 0;
    while report.checked < runs && attempts < runs * 20 {
        attempts += 1;
        let lower = if gen.chance(0.5) {
            FrameStack::empty()
        } else {
            gen.stack(2, 1)
        };
        let redex = Redex::Expr(gen.closed_expr(3));
        let (outcome, trace) = eval_traced(Configuration::new(lower.clone(), redex.clone()), fuel);
        let RunOutcome::Completed { result, steps } = outcome else {
            continue;
        };
        let extra = gen.stack(2, 1);
        let (tall, tall_trace) = eval_traced(
            Configuration::new(stack_concat(&lower, &extra), redex),
            steps,
        );
        let lifted =
            |c: &Configuration| Configuration::new(stack_concat(&c.stack, &extra), c.redex.clone());
        let expected_end = Configuration::new(extra.clone(), Redex::from_result(result));
        report.absorb(
            if tall_trace.len() != steps
                || tall_trace
                    .iter()
                    .zip(&trace)
                    .any(|(t, s)| t.rule != s.rule || t.before != lifted(&s.before))
            {
                Err(format!(
                    "traces diverge under {}",
                    print_config(&trace[0].before)
                ))
            } else if finished_config(tall) != Some(expected_end) {
                Err(format!(
                    "wrong end state under {}",
                    print_config(&trace[0].before)
                ))
            } else {
                Ok(())
            },
        );
    }
    report
}

/// `⟨K, r⟩ ⇓ⁿ` implies that `⟨ε, r⟩` reaches a result within `n` steps.
pub fn termination_in_empty_stack(runs: usize, seed: u64, fuel: usize) -> CheckReport {
    let mut report = CheckReport::new("termination and reductions");
    let mut gen = Gen::new(seed);
    let mut attempts = 0;
    while report.checked < runs && attempts < runs * 20 {
        attempts += 1;
        let stack = gen.stack(2, 1);
        let redex = Redex::Expr(gen.closed_expr(3));
        let Termination::Terminates { steps, .. } = terminates(&stack, &redex, fuel) else {
            continue;
        };
        report.absorb(
            match eval_star(
                Configuration::new(FrameStack::empty(), redex.clone()),
                steps,
            ) {
                RunOutcome::Completed { .. } => Ok(()),
                other => Err(format!(
                    "{redex:?} under {} stops at {other:?}",
                    print_config(&Configuration::new(stack, redex.clone()))
                )),
            },
        );
    }
    report
}

/// `⟨F :: K, e⟩` terminates exactly when `⟨K, F[e]⟩` does.
pub fn remove_add_frame(cases: usize, seed: u64, fuel: usize) -> CheckReport {
    let mut report = CheckReport::new("remove and add frame");
    let mut gen = Gen::new(seed);
    for _ in 0..cases {
        let frame = gen.frame(1);
        let e = gen.closed_expr(2);
        let lower = if gen.chance(0.3) {
            FrameStack::empty()
        } else {
            gen.stack(2, 1)
        };
        let Some(plugged) = plug(&frame, e.clone()) else {
            report.absorb(Err(format!("cannot plug {frame:?}")));
            continue;
        };
        let mut upper = lower.clone();
        upper.push(frame);
        let framed = terminates(&upper, &Redex::Expr(e.clone()), fuel);
        let whole = terminates(&lower, &Redex::Expr(plugged.clone()), fuel);
        if framed == Termination::Unknown || whole == Termination::Unknown {
            report.unknown += 1;
            continue;
        }
        report.absorb(if framed.terminated() == whole.terminated() {
            Ok(())
        } else {
            Err(format!(
                "{} vs {}: {framed:?} / {whole:?}",
                print_config(&Configuration::new(upper, e)),
                print_config(&Configuration::new(lower, plugged))
            ))
        });
    }
    report
}

/// Generated closed expressions are CIU-equivalent to themselves.
pub fn reflexivity(count: usize, seed: u64, cfg: &EquivConfig) -> CheckReport {
    let mut report = CheckReport::new("ciu reflexivity");
    let mut gen = Gen::new(seed);
    let exprs: Vec<Expr> = (0..count).map(|_| gen.closed_expr(3)).collect();
    let outcomes: Vec<Result<(), String>> = exprs
        .par_iter()
        .map(|e| {
            let r = Redex::Expr(e.clone());
            match ciu_equiv(&r, &r, &Default::default(), cfg) {
                Ok(v) if v.is_equivalent() => Ok(()),
                Ok(v) => Err(format!("{}: {v:?}", print_expr(e))),
                Err(err) => Err(format!("{}: {err}", print_expr(e))),
            }
        })
        .collect();
    outcomes.into_iter().for_each(|o| report.absorb(o));
    report
}

/// Closure-free values built from a few constants by nesting, in order of
/// construction and without duplicates.
pub fn enumerate_values(limit: usize) -> Vec<Value> {
    let base = vec![
        Value::int(0),
        Value::int(1),
        Value::atom("a"),
        Value::atom("b"),
        Value::Nil,
    ];
    let mut all = base.clone();
    let mut seen: HashSet<Value> = all.iter().cloned().collect();
    let mut layer = base.clone();
    while all.len() < limit {
        let mut next = Vec::new();
        for x in &layer {
            let mut candidates = vec![Value::Tuple(vec![x.clone()])];
            for y in &base {
                candidates.push(Value::cons(x.clone(), y.clone()));
                candidates.push(Value::cons(y.clone(), x.clone()));
                candidates.push(Value::Tuple(vec![x.clone(), y.clone()]));
                candidates.push(Value::map([(y.clone(), x.clone())]));
            }
            for c in candidates {
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.truncate(limit);
    all
}

/// Every enumerated value against itself, and against two others.
pub fn values_theorem(limit: usize, cfg: &EquivConfig) -> TheoremReport {
    let values = enumerate_values(limit);
    let n = values.len();
    let same = values.iter().map(|v| (v, v));
    let different = (0..n).flat_map(|i| {
        [
            (&values[i], &values[(i + 1) % n]),
            (&values[i], &values[(i + 7) % n]),
        ]
    });
    check_values_equal_theorem(same.chain(different), 3, cfg)
}

/// A case without a matching clause raises exactly `{error, if_clause, {}}`.
pub fn exc_case() -> CheckReport {
    let mut report = CheckReport::new("case without a match");
    let expected = EvalResult::Exc(Exception::if_clause());
    for src in [
        "case 1 of <2> when 'true' -> 'a' end",
        "case <1, 'a'> of <X, 'b'> when 'true' -> X <Y, Z> when 'false' -> Y end",
    ] {
        let e = parse_expr(src).expect("fixed source");
        let outcome = eval_star(Configuration::initial(e), 1_000);
        report.absorb(if outcome.result() == Some(&expected) {
            Ok(())
        } else {
            Err(format!("{src} gave {outcome:?}"))
        });
    }
    let direct = Configuration::new(
        FrameStack::from_top_first([Frame::CaseScrutinee(vec![])]),
        Redex::Values(vec![Value::int(1)]),
    );
    report.absorb(match step(&direct) {
        StepOutcome::Stepped {
            rule: Rule::ExcCase,
            next,
        } if next
            == Configuration::new(FrameStack::empty(), Redex::Exc(Exception::if_clause())) =>
        {
            Ok(())
        }
        other => Err(format!("no clauses gave {other:?}")),
    });
    report
}

/// Printing then parsing gives back the same term.
pub fn round_trip(count: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("print and parse round trip");
    let mut gen = Gen::new(seed);
    for _ in 0..count {
        let scope = [gen.fresh_var()];
        let e = gen.expr(3, &scope);
        let text = print_expr(&e);
        report.absorb(match parse_expr(&text) {
            Ok(back) if back == e => Ok(()),
            other => Err(format!("{text} read back as {other:?}")),
        });
        let v = gen.value(3);
        let text = print_value(&v);
        report.absorb(match parse_value(&text) {
            Ok(back) if back == v => Ok(()),
            other => Err(format!("{text} read back as {other:?}")),
        });
        let p = gen.pattern(3);
        let text = print_pattern(&p);
        report.absorb(match parse_pattern(&text) {
            Ok(back) if back == p => Ok(()),
            other => Err(format!("{text} read back as {other:?}")),
        });
    }
    report
}

/// Sizes used by the `check` subcommand and the acceptance suite.
pub mod sizes {
    pub const SEED: u64 = 7;
    pub const FUEL: usize = 100_000;
    pub const DETERMINISM: usize = 10_000;
    pub const EXTEND: usize = 500;
    pub const REMOVE_ADD: usize = 600;
    pub const REFLEXIVITY: usize = 1_000;
    pub const VALUES: usize = 1_500;
    pub const ROUND_TRIP: usize = 1_000;
}

/// The property suite at full size.
pub fn property_suite() -> Vec<CheckReport> {
    use sizes::*;
    let cfg = EquivConfig::default();
    let theorem = values_theorem(VALUES, &cfg);
    let mut values = CheckReport::new("equivalent values are equal");
    values.checked = theorem.accepted + theorem.rejected;
    for m in &theorem.mismatches {
        values.fail(|| {
            format!(
                "{} vs {}: related {}, == gives {}",
                print_value(&m.left),
                print_value(&m.right),
                m.related,
                print_value(&m.equal)
            )
        });
    }
    vec![
        determinism(DETERMINISM, SEED),
        extend_frame_stack(EXTEND, SEED, FUEL),
        termination_in_empty_stack(EXTEND, SEED, FUEL),
        remove_add_frame(REMOVE_ADD, SEED, FUEL),
        reflexivity(REFLEXIVITY, SEED, &cfg),
        values,
        exc_case(),
        round_trip(ROUND_TRIP, SEED),
    ]
}
