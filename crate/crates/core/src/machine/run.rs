use super::rules::{decide, fire, Decision};
use super::{Configuration, FrameStack, Redex, Rule};
use crate::ast::EvalResult;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    /// A final configuration was reached after `steps` reductions.
    Completed { result: EvalResult, steps: usize },
    /// The fuel ran out; carries the configuration reached.
    OutOfFuel(Configuration),
    Stuck {
        reason: String,
        config: Configuration,
    },
}

impl RunOutcome {
    pub fn result(&self) -> Option<&EvalResult> {
        match self {
            RunOutcome::Completed { result, .. } => Some(result),
            _ => None,
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, RunOutcome::Completed { .. })
    }
}

/// Runs `c` for at most `fuel` steps, calling `observe` with each rule and
/// the configuration it is applied to.
pub fn eval_with(
    c: Configuration,
    fuel: usize,
    mut observe: impl FnMut(Rule, &Configuration),
) -> RunOutcome {
    let mut c = c;
    let mut steps = 0;
    loop {
        match decide(&c) {
            Decision::Final(result) => return RunOutcome::Completed { result, steps },
            Decision::Stuck(reason) => return RunOutcome::Stuck { reason, config: c },
            Decision::Apply(_) if steps == fuel => return RunOutcome::OutOfFuel(c),
            Decision::Apply(rule) => {
                observe(rule, &c);
                c = fire(rule, c);
                steps += 1;
            }
        }
    }
}

pub fn eval_star(c: Configuration, fuel: usize) -> RunOutcome {
    eval_with(c, fuel, |_, _| {})
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub index: usize,
    pub rule: Rule,
    pub before: Configuration,
}

pub fn eval_traced(c: Configuration, fuel: usize) -> (RunOutcome, Vec<TraceStep>) {
    let mut trace = Vec::new();
    let outcome = eval_with(c, fuel, |rule, before| {
        trace.push(TraceStep {
            index: trace.len(),
            rule,
            before: before.clone(),
        })
    });
    (outcome, trace)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Termination {
    Terminates {
        steps: usize,
        result: EvalResult,
    },
    /// No rule applies; the configuration can never reach a result.
    Stuck(String),
    /// The fuel ran out first.
    Unknown,
}

impl Termination {
    pub fn terminated(&self) -> bool {
        matches!(self, Termination::Terminates { .. })
    }
}

/// `⟨K, r⟩ ⇓ⁿ` for the least such `n`, if it is at most `fuel`.
pub fn terminates(stack: &FrameStack, redex: &Redex, fuel: usize) -> Termination {
    match eval_star(Configuration::new(stack.clone(), redex.clone()), fuel) {
        RunOutcome::Completed { result, steps } => Termination::Terminates { steps, result },
        RunOutcome::Stuck { reason, .. } => Termination::Stuck(reason),
        RunOutcome::OutOfFuel(_) => Termination::Unknown,
    }
}
