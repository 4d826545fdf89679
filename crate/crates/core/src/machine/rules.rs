//! One-step reduction.
//!
//! [`step`] dispatches on the shape of the configuration and fires the one
//! rule that applies. [`applicable_rules`] instead checks each rule's premise
//! separately; the two are kept independent so that determinism can be
//! tested rather than assumed.

use super::{mk_closlist, Configuration, Frame, FrameId, Redex, Rule};
use crate::ast::{Closure, EvalResult, Expr, Name, Value, Var};
use crate::builtins;
use crate::matching::{is_match, match_patterns, MatchOutcome};
use crate::subst::Substitution;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepOutcome {
    Stepped {
        rule: Rule,
        next: Configuration,
    },
    /// The stack is empty and the redex is a result.
    Final(EvalResult),
    Stuck(String),
}

pub(super) enum Decision {
    Final(EvalResult),
    Apply(Rule),
    Stuck(String),
}

pub fn step(c: &Configuration) -> StepOutcome {
    match decide(c) {
        Decision::Final(r) => StepOutcome::Final(r),
        Decision::Stuck(why) => StepOutcome::Stuck(why),
        Decision::Apply(rule) => StepOutcome::Stepped {
            rule,
            next: fire(rule, c.clone()),
        },
    }
}

/// The rule [`step`] would fire, if any.
pub fn step_rule(c: &Configuration) -> Option<Rule> {
    match decide(c) {
        Decision::Apply(rule) => Some(rule),
        _ => None,
    }
}

fn is_bool(v: Option<&Value>, b: bool) -> bool {
    v.is_some_and(|v| v.is_atom(if b { "true" } else { "false" }))
}

fn expr_rule(e: &Expr) -> Rule {
    match e {
        Expr::Val(_) => Rule::PValue,
        Expr::Fun { .. } => Rule::PFun,
        Expr::Values(_) => Rule::SVals,
        Expr::Cons(..) => Rule::SConsTail,
        Expr::Tuple(_) => Rule::STuple,
        Expr::Map(pairs) if pairs.is_empty() => Rule::PMap0,
        Expr::Map(_) => Rule::SMap,
        Expr::Call { .. } => Rule::SCallMod,
        Expr::PrimOp { .. } => Rule::SPrimOp,
        Expr::Apply { .. } => Rule::SApp,
        Expr::Case { .. } => Rule::SCase,
        Expr::Let { .. } => Rule::SLet,
        Expr::Seq(..) => Rule::SSeq,
        Expr::LetRec { .. } => Rule::PLetRec,
        Expr::Try { .. } => Rule::STry,
    }
}

fn values_rule(vs: &[Value], frame: &Frame) -> Decision {
    let single = (vs.len() == 1).then(|| &vs[0]);
    let needs_single = |rule: Rule| match single {
        Some(_) => Decision::Apply(rule),
        None => Decision::Stuck(format!("{rule} expects a single value, got {}", vs.len())),
    };
    match frame {
        Frame::Params { id, done, todo } => {
            if !todo.is_empty() {
                needs_single(Rule::SParams)
            } else if *id == FrameId::Map && (done.len() + 1) % 2 != 0 {
                Decision::Stuck("map parameter list has an odd number of items".into())
            } else {
                needs_single(Rule::PParams)
            }
        }
        Frame::ConsTail(_) => needs_single(Rule::SConsHead),
        Frame::ConsHead(_) => needs_single(Rule::PCons),
        Frame::CallModule { .. } => needs_single(Rule::SCallFun),
        Frame::CallFunction { .. } => needs_single(Rule::SCallParam),
        Frame::AppFn { .. } => needs_single(Rule::SAppParam),
        Frame::CaseScrutinee(clauses) => match clauses.first() {
            None => Decision::Apply(Rule::ExcCase),
            Some(cl) if is_match(&cl.patterns, vs) => Decision::Apply(Rule::SCaseSuccess),
            Some(_) => Decision::Apply(Rule::SCaseFail),
        },
        Frame::CaseGuard { .. } => {
            if is_bool(single, true) {
                Decision::Apply(Rule::PCaseTrue)
            } else if is_bool(single, false) {
                Decision::Apply(Rule::SCaseFalse)
            } else {
                Decision::Stuck("guard did not evaluate to 'true' or 'false'".into())
            }
        }
        Frame::LetBind { vars, .. } if vars.len() == vs.len() => Decision::Apply(Rule::PLet),
        Frame::TryFirst { vars, .. } if vars.len() == vs.len() => Decision::Apply(Rule::PTry),
        Frame::LetBind { vars, .. } | Frame::TryFirst { vars, .. } => Decision::Stuck(format!(
            "{} variables bound to {} values",
            vars.len(),
            vs.len()
        )),
        Frame::SeqFirst(_) => needs_single(Rule::PSeq),
    }
}

pub(super) fn decide(c: &Configuration) -> Decision {
    match (&c.redex, c.stack.top()) {
        (Redex::Expr(e), _) => Decision::Apply(expr_rule(e)),
        (Redex::Values(vs), None) => Decision::Final(EvalResult::Values(vs.clone())),
        (Redex::Exc(x), None) => Decision::Final(EvalResult::Exc(x.clone())),
        (Redex::Box, None) => Decision::Stuck("box on the empty stack".into()),
        (Redex::Exc(_), Some(Frame::TryFirst { .. })) => Decision::Apply(Rule::ExcTry),
        (Redex::Exc(_), Some(_)) => Decision::Apply(Rule::ExcProp),
        (Redex::Box, Some(Frame::Params { id, done, todo })) if *id != FrameId::Map => {
            if todo.is_empty() {
                Decision::Apply(Rule::PParams0)
            } else if done.is_empty() {
                Decision::Apply(Rule::SParams0)
            } else {
                Decision::Stuck("box inside a partially evaluated parameter list".into())
            }
        }
        (Redex::Box, Some(_)) => {
            Decision::Stuck("box under a frame that is not a parameter list".into())
        }
        (Redex::Values(vs), Some(frame)) => values_rule(vs, frame),
    }
}

fn bind_vars(vars: &[Var], vals: impl IntoIterator<Item = Value>) -> Substitution {
    let mut s = Substitution::new();
    for (x, v) in vars.iter().zip(vals) {
        s.insert_trusted(Name::Var(x.clone()), v);
    }
    s
}

fn open_params(id: FrameId, todo: Vec<Expr>) -> (Frame, Redex) {
    (
        Frame::Params {
            id,
            done: Vec::new(),
            todo,
        },
        Redex::Box,
    )
}

fn single(vs: Vec<Value>) -> Value {
    vs.into_iter()
        .next()
        .expect("dispatch checked for a singleton")
}

/// Fires `rule`, which [`decide`] has chosen for `c`.
pub(super) fn fire(rule: Rule, c: Configuration) -> Configuration {
    let Configuration { mut stack, redex } = c;
    let redex = match redex {
        Redex::Expr(e) => {
            let (frame, next) = fire_expr(e);
            if let Some(f) = frame {
                stack.push(f);
            }
            next
        }
        Redex::Box => match stack.pop() {
            Some(Frame::Params { id, done, mut todo }) if rule == Rule::SParams0 => {
                let first = todo.remove(0);
                stack.push(Frame::Params { id, done, todo });
                Redex::Expr(first)
            }
            Some(Frame::Params { id, done, .. }) => builtins::eval(&id, done),
            _ => unreachable!("box is only reduced under a parameter frame"),
        },
        Redex::Exc(x) => match stack.pop() {
            Some(Frame::TryFirst {
                catch_vars,
                handler,
                ..
            }) => {
                let s = bind_vars(&catch_vars, [x.class.to_value(), x.reason, x.details]);
                Redex::Expr(s.apply_expr(&handler))
            }
            Some(_) => Redex::Exc(x),
            None => unreachable!("final configurations do not step"),
        },
        Redex::Values(vs) => {
            let frame = stack.pop().expect("final configurations do not step");
            let (frame, next) = fire_values(rule, frame, vs);
            if let Some(f) = frame {
                stack.push(f);
            }
            next
        }
    };
    Configuration { stack, redex }
}

fn fire_expr(e: Expr) -> (Option<Frame>, Redex) {
    let (frame, next) = match e {
        Expr::Val(v) => return (None, Redex::Values(vec![v])),
        Expr::Fun { params, body } => {
            let clos = Closure::new(Vec::new(), params, *body);
            return (None, Redex::Values(vec![Value::Closure(clos)]));
        }
        Expr::Map(pairs) if pairs.is_empty() => {
            return (None, Redex::Values(vec![Value::Map(vec![])]))
        }
        Expr::LetRec { defs, body } => {
            return (None, Redex::Expr(mk_closlist(&defs).apply_expr(&body)))
        }
        Expr::Values(es) => open_params(FrameId::Values, es),
        Expr::Tuple(es) => open_params(FrameId::Tuple, es),
        Expr::PrimOp { name, args } => open_params(FrameId::PrimOp(name), args),
        Expr::Map(pairs) => {
            let mut items = pairs.into_iter().flat_map(|(k, v)| [k, v]);
            let first = items.next().expect("nonempty map");
            (
                Frame::Params {
                    id: FrameId::Map,
                    done: Vec::new(),
                    todo: items.collect(),
                },
                Redex::Expr(first),
            )
        }
        Expr::Cons(head, tail) => (Frame::ConsTail(*head), Redex::Expr(*tail)),
        Expr::Call {
            module,
            function,
            args,
        } => (
            Frame::CallModule {
                function: *function,
                args,
            },
            Redex::Expr(*module),
        ),
        Expr::Apply { fun, args } => (Frame::AppFn { args }, Redex::Expr(*fun)),
        Expr::Case { scrutinee, clauses } => {
            (Frame::CaseScrutinee(clauses), Redex::Expr(*scrutinee))
        }
        Expr::Let { vars, bind, body } => {
            (Frame::LetBind { vars, body: *body }, Redex::Expr(*bind))
        }
        Expr::Seq(first, second) => (Frame::SeqFirst(*second), Redex::Expr(*first)),
        Expr::Try {
            expr,
            vars,
            body,
            catch_vars,
            handler,
        } => (
            Frame::TryFirst {
                vars,
                body: *body,
                catch_vars,
                handler: *handler,
            },
            Redex::Expr(*expr),
        ),
    };
    (Some(frame), next)
}

fn fire_values(rule: Rule, frame: Frame, vs: Vec<Value>) -> (Option<Frame>, Redex) {
    match frame {
        Frame::Params {
            id,
            mut done,
            mut todo,
        } => {
            done.push(single(vs));
            if todo.is_empty() {
                (None, builtins::eval(&id, done))
            } else {
                let next = todo.remove(0);
                (Some(Frame::Params { id, done, todo }), Redex::Expr(next))
            }
        }
        Frame::ConsTail(head) => (Some(Frame::ConsHead(single(vs))), Redex::Expr(head)),
        Frame::ConsHead(tail) => (None, Redex::Values(vec![Value::cons(single(vs), tail)])),
        Frame::CallModule { function, args } => (
            Some(Frame::CallFunction {
                module: single(vs),
                args,
            }),
            Redex::Expr(function),
        ),
        Frame::CallFunction { module, args } => {
            let (f, r) = open_params(FrameId::Call(module, single(vs)), args);
            (Some(f), r)
        }
        Frame::AppFn { args } => {
            let (f, r) = open_params(FrameId::App(single(vs)), args);
            (Some(f), r)
        }
        Frame::CaseScrutinee(mut clauses) => {
            if clauses.is_empty() {
                return (None, Redex::Exc(crate::ast::Exception::if_clause()));
            }
            let first = clauses.remove(0);
            match match_patterns(&first.patterns, &vs) {
                MatchOutcome::NoMatch => {
                    debug_assert_eq!(rule, Rule::SCaseFail);
                    (Some(Frame::CaseScrutinee(clauses)), Redex::Values(vs))
                }
                MatchOutcome::Bindings(s) => {
                    debug_assert_eq!(rule, Rule::SCaseSuccess);
                    let guard = s.apply_expr(&first.guard);
                    let frame = Frame::CaseGuard {
                        scrutinee: vs,
                        patterns: first.patterns,
                        body: s.apply_expr(&first.body),
                        rest: clauses,
                    };
                    (Some(frame), Redex::Expr(guard))
                }
            }
        }
        Frame::CaseGuard {
            scrutinee,
            body,
            rest,
            ..
        } => {
            if rule == Rule::PCaseTrue {
                (None, Redex::Expr(body))
            } else {
                (Some(Frame::CaseScrutinee(rest)), Redex::Values(scrutinee))
            }
        }
        Frame::LetBind { vars, body } => {
            (None, Redex::Expr(bind_vars(&vars, vs).apply_expr(&body)))
        }
        Frame::SeqFirst(second) => (None, Redex::Expr(second)),
        Frame::TryFirst { vars, body, .. } => {
            (None, Redex::Expr(bind_vars(&vars, vs).apply_expr(&body)))
        }
    }
}

/// Every rule whose premise holds for `c`, checked rule by rule.
pub fn applicable_rules(c: &Configuration) -> Vec<Rule> {
    Rule::ALL.into_iter().filter(|r| premise(*r, c)).collect()
}

fn premise(rule: Rule, c: &Configuration) -> bool {
    use Rule::*;
    let top = c.stack.top();
    let single = c.redex.singleton();
    let expr = match &c.redex {
        Redex::Expr(e) => Some(e),
        _ => None,
    };
    let values = match &c.redex {
        Redex::Values(vs) => Some(vs.as_slice()),
        _ => None,
    };
    let is_box = c.redex == Redex::Box;
    let is_exc = matches!(c.redex, Redex::Exc(_));
    match rule {
        SConsTail => matches!(expr, Some(Expr::Cons(..))),
        SLet => matches!(expr, Some(Expr::Let { .. })),
        SSeq => matches!(expr, Some(Expr::Seq(..))),
        SApp => matches!(expr, Some(Expr::Apply { .. })),
        SCallMod => matches!(expr, Some(Expr::Call { .. })),
        SPrimOp => matches!(expr, Some(Expr::PrimOp { .. })),
        SVals => matches!(expr, Some(Expr::Values(_))),
        STuple => matches!(expr, Some(Expr::Tuple(_))),
        SMap => matches!(expr, Some(Expr::Map(ps)) if !ps.is_empty()),
        SCase => matches!(expr, Some(Expr::Case { .. })),
        SConsHead => single.is_some() && matches!(top, Some(Frame::ConsTail(_))),
        SCallFun => single.is_some() && matches!(top, Some(Frame::CallModule { .. })),
        SCallParam => single.is_some() && matches!(top, Some(Frame::CallFunction { .. })),
        SAppParam => single.is_some() && matches!(top, Some(Frame::AppFn { .. })),
        SCaseFail => match (values, top) {
            (Some(vs), Some(Frame::CaseScrutinee(cls))) => {
                cls.first().is_some_and(|cl| !is_match(&cl.patterns, vs))
            }
            _ => false,
        },
        SCaseSuccess => match (values, top) {
            (Some(vs), Some(Frame::CaseScrutinee(cls))) => {
                cls.first().is_some_and(|cl| is_match(&cl.patterns, vs))
            }
            _ => false,
        },
        SCaseFalse => is_bool(single, false) && matches!(top, Some(Frame::CaseGuard { .. })),
        SParams0 => {
            is_box
                && matches!(top, Some(Frame::Params { id, done, todo })
                    if *id != FrameId::Map && done.is_empty() && !todo.is_empty())
        }
        SParams => {
            single.is_some() && matches!(top, Some(Frame::Params { todo, .. }) if !todo.is_empty())
        }
        PMap0 => matches!(expr, Some(Expr::Map(ps)) if ps.is_empty()),
        PFun => matches!(expr, Some(Expr::Fun { .. })),
        PLetRec => matches!(expr, Some(Expr::LetRec { .. })),
        PValue => matches!(expr, Some(Expr::Val(_))),
        PParams0 => {
            is_box
                && matches!(top, Some(Frame::Params { id, todo, .. }) if *id != FrameId::Map && todo.is_empty())
        }
        PParams => {
            single.is_some()
                && matches!(top, Some(Frame::Params { id, done, todo })
                    if todo.is_empty() && (*id != FrameId::Map || (done.len() + 1) % 2 == 0))
        }
        PCons => single.is_some() && matches!(top, Some(Frame::ConsHead(_))),
        PCaseTrue => is_bool(single, true) && matches!(top, Some(Frame::CaseGuard { .. })),
        PLet => match (values, top) {
            (Some(vs), Some(Frame::LetBind { vars, .. })) => vars.len() == vs.len(),
            _ => false,
        },
        PSeq => single.is_some() && matches!(top, Some(Frame::SeqFirst(_))),
        ExcCase => {
            values.is_some() && matches!(top, Some(Frame::CaseScrutinee(cls)) if cls.is_empty())
        }
        STry => matches!(expr, Some(Expr::Try { .. })),
        PTry => match (values, top) {
            (Some(vs), Some(Frame::TryFirst { vars, .. })) => vars.len() == vs.len(),
            _ => false,
        },
        ExcTry => is_exc && matches!(top, Some(Frame::TryFirst { .. })),
        ExcProp => is_exc && top.is_some_and(|f| !matches!(f, Frame::TryFirst { .. })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Clause, Exception, Pattern};
    use crate::machine::FrameStack;

    fn stepped(c: &Configuration) -> (Rule, Configuration) {
        match step(c) {
            StepOutcome::Stepped { rule, next } => (rule, next),
            other => panic!("expected a step, got {other:?}"),
        }
    }

    #[test]
    fn cons_evaluates_its_tail_first() {
        let c = Configuration::initial(Expr::cons(Expr::var("E1"), Expr::var("E2")));
        let (rule, next) = stepped(&c);
        assert_eq!(rule, Rule::SConsTail);
        assert_eq!(
            next.stack,
            FrameStack::from_top_first([Frame::ConsTail(Expr::var("E1"))])
        );
        assert_eq!(next.redex, Redex::Expr(Expr::var("E2")));
    }

    #[test]
    fn a_value_becomes_a_singleton_sequence() {
        let c = Configuration::initial(Expr::atom("ok"));
        let (rule, next) = stepped(&c);
        assert_eq!(rule, Rule::PValue);
        assert_eq!(next.redex, Redex::Values(vec![Value::atom("ok")]));
    }

    #[test]
    fn exceptions_propagate_past_ordinary_frames() {
        let x = Exception::error("badarg", Value::int(0));
        let c = Configuration::new(
            FrameStack::from_top_first([Frame::SeqFirst(Expr::int(2))]),
            Redex::Exc(x.clone()),
        );
        let (rule, next) = stepped(&c);
        assert_eq!(rule, Rule::ExcProp);
        assert_eq!(next, Configuration::new(FrameStack::empty(), Redex::Exc(x)));
    }

    #[test]
    fn exhausted_case_raises_if_clause() {
        let c = Configuration::new(
            FrameStack::from_top_first([Frame::CaseScrutinee(vec![])]),
            Redex::Values(vec![Value::int(1)]),
        );
        let (rule, next) = stepped(&c);
        assert_eq!(rule, Rule::ExcCase);
        assert_eq!(next.redex, Redex::Exc(Exception::if_clause()));
    }

    #[test]
    fn case_success_substitutes_into_guard_and_body() {
        let clause = Clause::new(vec![Pattern::var("X")], Expr::var("X"), Expr::var("X"));
        let c = Configuration::new(
            FrameStack::from_top_first([Frame::CaseScrutinee(vec![clause])]),
            Redex::Values(vec![Value::atom("true")]),
        );
        let (rule, next) = stepped(&c);
        assert_eq!(rule, Rule::SCaseSuccess);
        assert_eq!(next.redex, Redex::Expr(Expr::atom("true")));
        let Some(Frame::CaseGuard { body, .. }) = next.stack.top() else {
            panic!()
        };
        assert_eq!(*body, Expr::atom("true"));
    }

    #[test]
    fn box_on_empty_stack_is_stuck() {
        let c = Configuration::new(FrameStack::empty(), Redex::Box);
        assert!(matches!(step(&c), StepOutcome::Stuck(_)));
        assert!(applicable_rules(&c).is_empty());
    }

    #[test]
    fn let_arity_mismatch_is_stuck() {
        let c = Configuration::new(
            FrameStack::from_top_first([Frame::LetBind {
                vars: vec![Var::new("A"), Var::new("B")],
                body: Expr::atom("ok"),
            }]),
            Redex::Values(vec![Value::int(1)]),
        );
        assert!(matches!(step(&c), StepOutcome::Stuck(_)));
    }

    #[test]
    fn final_configurations_report_their_result() {
        let c = Configuration::new(FrameStack::empty(), Redex::Values(vec![Value::int(1)]));
        assert_eq!(
            step(&c),
            StepOutcome::Final(EvalResult::Values(vec![Value::int(1)]))
        );
    }

    #[test]
    fn empty_tuple_goes_through_box() {
        let c = Configuration::initial(Expr::Tuple(vec![]));
        let (r1, c1) = stepped(&c);
        let (r2, c2) = stepped(&c1);
        assert_eq!((r1, r2), (Rule::STuple, Rule::PParams0));
        assert_eq!(c2.redex, Redex::Values(vec![Value::tuple([])]));
    }

    #[test]
    fn guard_must_be_boolean() {
        let c = Configuration::new(
            FrameStack::from_top_first([Frame::CaseGuard {
                scrutinee: vec![],
                patterns: vec![],
                body: Expr::int(1),
                rest: vec![],
            }]),
            Redex::Values(vec![Value::int(3)]),
        );
        assert!(matches!(step(&c), StepOutcome::Stuck(_)));
    }
}
