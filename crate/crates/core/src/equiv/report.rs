use std::collections::BTreeMap;

use serde::Serialize;

use crate::ast::Name;
use crate::frontend::{print_redex, print_result, print_stack, print_value};
use crate::machine::Termination;

use super::{EquivConfig, UnknownReason, Verdict, Witness};

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct WitnessReport {
    pub stack: String,
    pub substitution: BTreeMap<String, String>,
    pub left: String,
    pub right: String,
    pub left_outcome: String,
    pub right_outcome: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VerdictReport {
    pub verdict: &'static str,
    pub tests_run: usize,
    pub seed: u64,
    pub fuel: usize,
    pub stacks: usize,
    pub substitutions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

pub fn outcome_text(t: &Termination) -> String {
    match t {
        Termination::Terminates { steps, result } => {
            format!("terminates in {steps} steps with {}", print_result(result))
        }
        Termination::Stuck(reason) => format!("stuck: {reason}"),
        Termination::Unknown => "out of fuel".to_string(),
    }
}

fn name_text(n: &Name) -> String {
    match n {
        Name::Var(x) => x.as_str().to_string(),
        Name::FunId(f) => format!("'{}'/{}", f.name.as_str(), f.arity),
    }
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        WitnessReport {
            stack: print_stack(&w.stack),
            substitution: w
                .subst
                .iter()
                .map(|(n, v)| (name_text(n), print_value(v)))
                .collect(),
            left: print_redex(&w.left),
            right: print_redex(&w.right),
            left_outcome: outcome_text(&w.left_outcome),
            right_outcome: outcome_text(&w.right_outcome),
        }
    }
}

impl VerdictReport {
    pub fn new(verdict: &Verdict, cfg: &EquivConfig) -> Self {
        let (kind, reason) = match verdict {
            Verdict::Equivalent { .. } => ("equivalent", None),
            Verdict::Inequivalent { .. } => ("inequivalent", None),
            Verdict::Unknown {
                reason: UnknownReason::Fuel,
                ..
            } => ("unknown", Some("fuel")),
        };
        VerdictReport {
            verdict: kind,
            tests_run: verdict.tests_run(),
            seed: cfg.seed,
            fuel: cfg.fuel,
            stacks: cfg.num_stacks,
            substitutions: cfg.num_substitutions,
            reason,
            witness: verdict.witness().map(WitnessReport::from),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::EvalResult;
    use crate::ast::Value;

    #[test]
    fn equivalent_reports_have_no_witness() {
        let cfg = EquivConfig::default();
        let json = VerdictReport::new(&Verdict::Equivalent { tests_run: 7 }, &cfg).to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["verdict"], "equivalent");
        assert_eq!(parsed["tests_run"], 7);
        assert_eq!(parsed["seed"], cfg.seed);
        assert!(parsed.get("witness").is_none());
    }

    #[test]
    fn outcomes_read_plainly() {
        let t = Termination::Terminates {
            steps: 1,
            result: EvalResult::Values(vec![Value::int(1)]),
        };
        assert_eq!(outcome_text(&t), "terminates in 1 steps with <1>");
        assert_eq!(outcome_text(&Termination::Unknown), "out of fuel");
    }
}
