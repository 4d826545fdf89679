//! Bounded equivalence checking.
//!
//! `ciu_le` places both redexes, under generated closing substitutions, in
//! a family of frame stacks and compares whether they terminate. Fuel makes
//! termination only semi-decidable, so a left run that completes while the
//! right one runs out of fuel yields `Unknown` rather than a verdict.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::ast::{check_scope, free_names, EvalResult, Name, Value};
use crate::builtins::bif_equal;
use crate::gen::{interesting_values, Gen};
use crate::machine::{terminates, FrameStack, Redex, Termination};
use crate::subst::{apply, Substitution};

mod observe;
mod report;
mod values;

pub use observe::{application_probe, inspection_stack, observers, stuck_expr};
pub use report::{outcome_text, VerdictReport, WitnessReport};
pub use values::{check_values_equal_theorem, value_rel, Mismatch, TheoremReport};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EquivConfig {
    pub fuel: usize,
    pub stack_depth_max: usize,
    pub value_depth_max: usize,
    pub num_stacks: usize,
    pub num_substitutions: usize,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            fuel: 100_000,
            stack_depth_max: 3,
            value_depth_max: 3,
            num_stacks: 50,
            num_substitutions: 100,
            seed: 2024,
        }
    }
}

impl EquivConfig {
    pub fn validate(&self) -> Result<(), EquivError> {
        let bounds = [
            ("fuel", self.fuel),
            ("stack_depth_max", self.stack_depth_max),
            ("value_depth_max", self.value_depth_max),
            ("num_stacks", self.num_stacks),
            ("num_substitutions", self.num_substitutions),
        ];
        match bounds.iter().find(|(_, b)| *b == 0) {
            Some((name, _)) => Err(EquivError::InvalidConfig(name)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EquivError {
    #[error("{0} must be positive")]
    InvalidConfig(&'static str),
    #[error("free names outside the given scope: {}", .0.iter().map(|n| format!("{n:?}")).collect::<Vec<_>>().join(", "))]
    OutOfScope(Vec<Name>),
}

/// A trial that separates the two sides: both closed redexes placed in
/// `stack`, and what happened to each.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub stack: FrameStack,
    pub subst: Substitution,
    pub left: Redex,
    pub right: Redex,
    pub left_outcome: Termination,
    pub right_outcome: Termination,
    pub fuel: usize,
}

impl Witness {
    /// Runs both sides again.
    pub fn replay(&self) -> (Termination, Termination) {
        (
            terminates(&self.stack, &self.left, self.fuel),
            terminates(&self.stack, &self.right, self.fuel),
        )
    }

    pub fn reproduces(&self) -> bool {
        self.replay() == (self.left_outcome.clone(), self.right_outcome.clone())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnknownReason {
    Fuel,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Equivalent {
        tests_run: usize,
    },
    Inequivalent {
        tests_run: usize,
        witness: Box<Witness>,
    },
    Unknown {
        tests_run: usize,
        reason: UnknownReason,
        witness: Box<Witness>,
    },
}

impl Verdict {
    pub fn tests_run(&self) -> usize {
        match self {
            Verdict::Equivalent { tests_run }
            | Verdict::Inequivalent { tests_run, .. }
            | Verdict::Unknown { tests_run, .. } => *tests_run,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Equivalent { .. } => None,
            Verdict::Inequivalent { witness, .. } | Verdict::Unknown { witness, .. } => {
                Some(witness)
            }
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, Verdict::Inequivalent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    /// Inequivalent dominates Unknown, which dominates Equivalent; the
    /// earlier verdict wins a tie.
    pub fn merge(self, other: Verdict) -> Verdict {
        let total = self.tests_run() + other.tests_run();
        let rank = |v: &Verdict| match v {
            Verdict::Inequivalent { .. } => 2,
            Verdict::Unknown { .. } => 1,
            Verdict::Equivalent { .. } => 0,
        };
        let mut winner = if rank(&other) > rank(&self) {
            other
        } else {
            self
        };
        match &mut winner {
            Verdict::Equivalent { tests_run }
            | Verdict::Inequivalent { tests_run, .. }
            | Verdict::Unknown { tests_run, .. } => *tests_run = total,
        }
        winner
    }
}

enum Trial {
    Pass,
    Fail(Witness),
    Unknown(Witness),
}

/// Closure-free results compared with `==`, exceptions componentwise.
fn same_observation(a: &EvalResult, b: &EvalResult) -> bool {
    let equal = |x: &Value, y: &Value| bif_equal(x, y).is_atom("true");
    match (a, b) {
        (EvalResult::Values(xs), EvalResult::Values(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| equal(x, y))
        }
        (EvalResult::Exc(x), EvalResult::Exc(y)) => {
            x.class == y.class && equal(&x.reason, &y.reason) && equal(&x.details, &y.details)
        }
        _ => false,
    }
}

fn closure_free(r: &EvalResult) -> bool {
    match r {
        EvalResult::Values(vs) => vs.iter().all(Value::is_closure_free),
        EvalResult::Exc(x) => x.reason.is_closure_free() && x.details.is_closure_free(),
    }
}

struct Case {
    subst: Substitution,
    left: Redex,
    right: Redex,
    stack: FrameStack,
}

fn run_trial(case: &Case, fuel: usize) -> Trial {
    let left = terminates(&case.stack, &case.left, fuel);
    if let Termination::Stuck(_) = left {
        return Trial::Pass;
    }
    let right = terminates(&case.stack, &case.right, fuel);
    let separated = match (&left, &right) {
        (Termination::Terminates { result: l, .. }, Termination::Terminates { result: r, .. }) => {
            case.stack.is_empty() && closure_free(l) && closure_free(r) && !same_observation(l, r)
        }
        (Termination::Terminates { .. }, Termination::Stuck(_)) => true,
        _ => false,
    };
    let undecided = !separated && !right.terminated();
    if !separated && !undecided {
        return Trial::Pass;
    }
    let witness = Witness {
        stack: case.stack.clone(),
        subst: case.subst.clone(),
        left: case.left.clone(),
        right: case.right.clone(),
        left_outcome: left,
        right_outcome: right,
        fuel,
    };
    if separated {
        Trial::Fail(witness)
    } else {
        Trial::Unknown(witness)
    }
}

/// `n` argument tuples of the given arity, drawn from the interesting values.
pub(crate) fn sample_arguments(arity: usize, n: usize) -> Vec<Vec<Value>> {
    let pool = interesting_values();
    if arity == 0 {
        return vec![Vec::new()];
    }
    (0..n)
        .map(|k| {
            (0..arity)
                .map(|j| pool[(k + j * 3) % pool.len()].clone())
                .collect()
        })
        .collect()
}

const PROBE_DEPTH: usize = 2;
const PROBE_SAMPLES: usize = 4;

fn substitutions(gamma: &BTreeSet<Name>, cfg: &EquivConfig, gen: &mut Gen) -> Vec<Substitution> {
    if gamma.is_empty() {
        return vec![Substitution::new()];
    }
    let pool = interesting_values();
    (0..cfg.num_substitutions)
        .map(|i| {
            let mut s = Substitution::new();
            for (j, name) in gamma.iter().enumerate() {
                let v = match name {
                    Name::FunId(f) => Value::Closure(gen.closure(f.arity, cfg.value_depth_max)),
                    Name::Var(_) if i < pool.len() => pool[(i + j) % pool.len()].clone(),
                    Name::Var(_) => gen.value(cfg.value_depth_max),
                };
                s.bind(name.clone(), v)
                    .expect("generated values are closed");
            }
            s
        })
        .collect()
}

/// `r1 ≤ r2` on closed instances of use: whenever `r1[σ]` terminates in a
/// stack, `r2[σ]` must terminate there too.
pub fn ciu_le(
    r1: &Redex,
    r2: &Redex,
    gamma: &BTreeSet<Name>,
    cfg: &EquivConfig,
) -> Result<Verdict, EquivError> {
    cfg.validate()?;
    let outside: Vec<Name> = free_names(r1)
        .into_iter()
        .chain(free_names(r2))
        .filter(|n| !gamma.contains(n))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !outside.is_empty() || !check_scope(gamma, r1) || !check_scope(gamma, r2) {
        return Err(EquivError::OutOfScope(outside));
    }

    let mut gen = Gen::new(cfg.seed);
    let substs = substitutions(gamma, cfg, &mut gen);
    let stacks: Vec<FrameStack> = (0..cfg.num_stacks)
        .map(|_| gen.stack(cfg.stack_depth_max, 2))
        .collect();

    let samples = |arity: usize| sample_arguments(arity, PROBE_SAMPLES);
    let per_subst: Vec<Vec<Case>> = substs
        .into_par_iter()
        .map(|subst| {
            let left = apply(r1, &subst);
            let right = apply(r2, &subst);
            let probes = observers(&left, &FrameStack::empty(), &samples, PROBE_DEPTH, cfg.fuel);
            probes
                .into_iter()
                .chain(std::iter::once(FrameStack::empty()))
                .chain(stacks.iter().cloned())
                .map(|stack| Case {
                    subst: subst.clone(),
                    left: left.clone(),
                    right: right.clone(),
                    stack,
                })
                .collect()
        })
        .collect();
    let cases: Vec<Case> = per_subst.into_iter().flatten().collect();

    let trials: Vec<Trial> = cases.par_iter().map(|c| run_trial(c, cfg.fuel)).collect();
    let tests_run = trials.len();
    let mut unknown = None;
    for t in trials {
        match t {
            Trial::Pass => {}
            Trial::Fail(w) => {
                return Ok(Verdict::Inequivalent {
                    tests_run,
                    witness: Box::new(w),
                })
            }
            Trial::Unknown(w) => {
                unknown.get_or_insert(w);
            }
        }
    }
    Ok(match unknown {
        Some(w) => Verdict::Unknown {
            tests_run,
            reason: UnknownReason::Fuel,
            witness: Box::new(w),
        },
        None => Verdict::Equivalent { tests_run },
    })
}

/// Both directions of [`ciu_le`].
pub fn ciu_equiv(
    r1: &Redex,
    r2: &Redex,
    gamma: &BTreeSet<Name>,
    cfg: &EquivConfig,
) -> Result<Verdict, EquivError> {
    let forward = ciu_le(r1, r2, gamma, cfg)?;
    let backward = ciu_le(r2, r1, gamma, cfg)?;
    Ok(forward.merge(backward))
}
