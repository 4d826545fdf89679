//! Stacks built to tell results apart.
//!
//! An inspection stack completes exactly when the redex below it produces
//! the observed result, and gets stuck on anything else. Exceptions are
//! caught so that they cannot escape to the empty stack and count as
//! termination.

use crate::ast::{Clause, EvalResult, Exception, Expr, Pattern, Value, Var};
use crate::machine::{
    eval_star, stack_concat, Configuration, Frame, FrameStack, Redex, RunOutcome,
};

/// `let <_Stuck1, _Stuck2> = 'ok' in 'ok'`, which can never take a step
/// past binding its one value to two variables.
pub fn stuck_expr() -> Expr {
    Expr::let_(
        vec![Var::new("_Stuck1"), Var::new("_Stuck2")],
        Expr::atom("ok"),
        Expr::atom("ok"),
    )
}

struct Fresh(usize);

impl Fresh {
    fn var(&mut self) -> Var {
        self.0 += 1;
        Var::new(format!("_Obs{}", self.0))
    }
}

/// A pattern matching `v` exactly, plus the guard conjuncts it still needs.
/// Maps match partially, so they are bound to a variable and compared in
/// the guard; closures cannot be inspected and become wildcards.
fn exact_pattern(v: &Value, fresh: &mut Fresh, guards: &mut Vec<Expr>) -> Pattern {
    match v {
        Value::Int(i) => Pattern::Int(i.clone()),
        Value::Atom(a) => Pattern::Atom(a.clone()),
        Value::Nil => Pattern::Nil,
        Value::Cons(h, t) => Pattern::cons(
            exact_pattern(h, fresh, guards),
            exact_pattern(t, fresh, guards),
        ),
        Value::Tuple(vs) => {
            Pattern::Tuple(vs.iter().map(|v| exact_pattern(v, fresh, guards)).collect())
        }
        Value::Map(_) if v.is_closure_free() => {
            let x = fresh.var();
            guards.push(Expr::call(
                "erlang",
                "=:=",
                vec![Expr::Val(Value::Var(x.clone())), Expr::Val(v.clone())],
            ));
            Pattern::Var(x)
        }
        _ => Pattern::Var(fresh.var()),
    }
}

fn conjunction(guards: Vec<Expr>) -> Expr {
    guards
        .into_iter()
        .reduce(|acc, g| Expr::call("erlang", "and", vec![acc, g]))
        .unwrap_or_else(|| Expr::atom("true"))
}

fn check_clauses(values: &[Value], fresh: &mut Fresh) -> Vec<Clause> {
    let mut guards = Vec::new();
    let patterns: Vec<Pattern> = values
        .iter()
        .map(|v| exact_pattern(v, fresh, &mut guards))
        .collect();
    let wildcards: Vec<Pattern> = values.iter().map(|_| Pattern::Var(fresh.var())).collect();
    vec![
        Clause::new(patterns, conjunction(guards), Expr::atom("ok")),
        Clause::new(wildcards, Expr::atom("true"), stuck_expr()),
    ]
}

/// Frames, top first, that complete on `result` and are stuck otherwise.
pub fn inspection_frames(result: &EvalResult) -> Vec<Frame> {
    let mut fresh = Fresh(0);
    match result {
        EvalResult::Values(vs) => {
            let check = Frame::CaseScrutinee(check_clauses(vs, &mut fresh));
            let r = fresh.var();
            let catch = [fresh.var(), fresh.var(), fresh.var()];
            let guard_exc = Frame::TryFirst {
                vars: vec![r.clone()],
                body: Expr::Val(Value::Var(r)),
                catch_vars: catch,
                handler: stuck_expr(),
            };
            vec![check, guard_exc]
        }
        EvalResult::Exc(Exception {
            class,
            reason,
            details,
        }) => {
            let observed = [class.to_value(), reason.clone(), details.clone()];
            let catch = [fresh.var(), fresh.var(), fresh.var()];
            let check = Expr::case(
                Expr::Values(
                    catch
                        .iter()
                        .cloned()
                        .map(|x| Expr::Val(Value::Var(x)))
                        .collect(),
                ),
                check_clauses(&observed, &mut fresh),
            );
            let r = fresh.var();
            vec![Frame::TryFirst {
                vars: vec![r],
                body: stuck_expr(),
                catch_vars: catch,
                handler: check,
            }]
        }
    }
}

pub fn inspection_stack(result: &EvalResult) -> FrameStack {
    FrameStack::from_top_first(inspection_frames(result))
}

/// `let <F> = □ in apply F(args)`
pub fn application_probe(args: &[Value]) -> Frame {
    let f = Var::new("_Probe");
    Frame::LetBind {
        vars: vec![f.clone()],
        body: Expr::apply(
            Expr::Val(Value::Var(f)),
            args.iter().cloned().map(Expr::Val).collect(),
        ),
    }
}

/// Observer stacks for `left`: an inspection of its result under `prefix`,
/// and, when that result is a single closure, application probes with each
/// argument tuple from `samples`, followed in turn by their own observers.
pub fn observers(
    left: &Redex,
    prefix: &FrameStack,
    samples: &dyn Fn(usize) -> Vec<Vec<Value>>,
    depth: usize,
    fuel: usize,
) -> Vec<FrameStack> {
    let outcome = eval_star(Configuration::new(prefix.clone(), left.clone()), fuel);
    let RunOutcome::Completed { result, .. } = outcome else {
        return Vec::new();
    };
    let mut out = vec![stack_concat(prefix, &inspection_stack(&result))];
    if depth == 0 {
        return out;
    }
    if let EvalResult::Values(vs) = &result {
        if let [Value::Closure(c)] = vs.as_slice() {
            for args in samples(c.arity()) {
                let probe = FrameStack::from_top_first([application_probe(&args)]);
                let next = stack_concat(prefix, &probe);
                out.extend(observers(left, &next, samples, depth - 1, fuel));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::terminates;

    const FUEL: usize = 10_000;

    fn completes(k: &FrameStack, r: Redex) -> bool {
        terminates(k, &r, FUEL).terminated()
    }

    #[test]
    fn inspection_accepts_only_the_observed_values() {
        let observed = EvalResult::Values(vec![Value::int(1)]);
        let k = inspection_stack(&observed);
        assert!(completes(&k, Redex::Values(vec![Value::int(1)])));
        assert!(!completes(&k, Redex::Values(vec![Value::int(2)])));
        assert!(!completes(
            &k,
            Redex::Values(vec![Value::int(1), Value::int(1)])
        ));
        assert!(!completes(&k, Redex::Exc(Exception::if_clause())));
    }

    #[test]
    fn inspection_compares_maps_exactly() {
        let m = Value::map([(Value::int(1), Value::int(2))]);
        let bigger = Value::map([
            (Value::int(1), Value::int(2)),
            (Value::int(3), Value::int(4)),
        ]);
        let k = inspection_stack(&EvalResult::Values(vec![m.clone()]));
        assert!(completes(&k, Redex::Values(vec![m])));
        assert!(!completes(&k, Redex::Values(vec![bigger])));
    }

    #[test]
    fn inspection_of_exceptions() {
        let x = Exception::error("badarg", Value::int(0));
        let k = inspection_stack(&EvalResult::Exc(x.clone()));
        assert!(completes(&k, Redex::Exc(x)));
        assert!(!completes(
            &k,
            Redex::Exc(Exception::error("badarg", Value::int(1)))
        ));
        assert!(!completes(&k, Redex::Values(vec![Value::int(0)])));
    }

    #[test]
    fn stuck_expr_is_stuck() {
        assert!(matches!(
            terminates(&FrameStack::empty(), &Redex::Expr(stuck_expr()), FUEL),
            crate::machine::Termination::Stuck(_)
        ));
    }

    #[test]
    fn probes_reach_inside_closures() {
        let left = Redex::Expr(crate::frontend::parse_expr("fun (X) -> X").unwrap());
        let samples = |_: usize| vec![vec![Value::int(5)]];
        let obs = observers(&left, &FrameStack::empty(), &samples, 1, FUEL);
        assert_eq!(obs.len(), 2);
        let right = Redex::Expr(crate::frontend::parse_expr("fun (X) -> 5").unwrap());
        assert!(obs.iter().all(|k| completes(k, right.clone())));
        let wrong = Redex::Expr(crate::frontend::parse_expr("fun (X) -> 6").unwrap());
        assert!(!completes(&obs[1], wrong));
    }
}
