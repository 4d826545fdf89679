use super::{Frame, FrameId};
use crate::ast::{Clause, Expr};

/// `F[e]`: the expression obtained by filling the hole of `frame` with `e`.
///
/// A guard frame cannot be rebuilt literally, because the clause body already
/// has the match bindings substituted in. It becomes
/// `case <> of <> when e -> body; <> when 'true' -> case vs of rest end end`.
///
/// Returns `None` only for a map parameter frame whose items cannot be paired
/// up into keys and values.
pub fn plug(frame: &Frame, e: Expr) -> Option<Expr> {
    Some(match frame {
        Frame::Params { id, done, todo } => {
            let mut items: Vec<Expr> = done.iter().cloned().map(Expr::Val).collect();
            items.push(e);
            items.extend(todo.iter().cloned());
            match id {
                FrameId::Tuple => Expr::Tuple(items),
                FrameId::Values => Expr::Values(items),
                FrameId::Map => {
                    if !items.len().is_multiple_of(2) {
                        return None;
                    }
                    let mut it = items.into_iter();
                    let mut pairs = Vec::new();
                    while let (Some(k), Some(v)) = (it.next(), it.next()) {
                        pairs.push((k, v));
                    }
                    Expr::Map(pairs)
                }
                FrameId::PrimOp(name) => Expr::PrimOp {
                    name: name.clone(),
                    args: items,
                },
                FrameId::Call(m, f) => Expr::Call {
                    module: Box::new(Expr::Val(m.clone())),
                    function: Box::new(Expr::Val(f.clone())),
                    args: items,
                },
                FrameId::App(f) => Expr::apply(Expr::Val(f.clone()), items),
            }
        }
        Frame::ConsTail(head) => Expr::cons(head.clone(), e),
        Frame::ConsHead(tail) => Expr::cons(e, Expr::Val(tail.clone())),
        Frame::CallModule { function, args } => Expr::Call {
            module: Box::new(e),
            function: Box::new(function.clone()),
            args: args.clone(),
        },
        Frame::CallFunction { module, args } => Expr::Call {
            module: Box::new(Expr::Val(module.clone())),
            function: Box::new(e),
            args: args.clone(),
        },
        Frame::AppFn { args } => Expr::apply(e, args.clone()),
        Frame::CaseScrutinee(clauses) => Expr::case(e, clauses.clone()),
        Frame::CaseGuard {
            scrutinee,
            body,
            rest,
            ..
        } => {
            let fallback = Expr::case(
                Expr::Values(scrutinee.iter().cloned().map(Expr::Val).collect()),
                rest.clone(),
            );
            Expr::case(
                Expr::Values(Vec::new()),
                vec![
                    Clause::new(Vec::new(), e, body.clone()),
                    Clause::new(Vec::new(), Expr::atom("true"), fallback),
                ],
            )
        }
        Frame::LetBind { vars, body } => Expr::let_(vars.clone(), e, body.clone()),
        Frame::SeqFirst(second) => Expr::seq(e, second.clone()),
        Frame::TryFirst {
            vars,
            body,
            catch_vars,
            handler,
        } => Expr::try_(
            e,
            vars.clone(),
            body.clone(),
            catch_vars.clone(),
            handler.clone(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Pattern, Value};

    #[test]
    fn seq_frame_plugs_syntactically() {
        let f = Frame::SeqFirst(Expr::int(2));
        assert_eq!(
            plug(&f, Expr::int(1)),
            Some(Expr::seq(Expr::int(1), Expr::int(2)))
        );
    }

    #[test]
    fn cons_head_frame_reinjects_the_tail_value() {
        let f = Frame::ConsHead(Value::Nil);
        assert_eq!(
            plug(&f, Expr::var("E")),
            Some(Expr::cons(Expr::var("E"), Expr::nil()))
        );
    }

    #[test]
    fn params_frame_puts_the_hole_between_values_and_expressions() {
        let f = Frame::Params {
            id: FrameId::Tuple,
            done: vec![Value::int(1)],
            todo: vec![Expr::int(3)],
        };
        assert_eq!(
            plug(&f, Expr::int(2)),
            Some(Expr::Tuple(vec![Expr::int(1), Expr::int(2), Expr::int(3)]))
        );
    }

    #[test]
    fn map_frame_parity() {
        let odd_total = Frame::Params {
            id: FrameId::Map,
            done: vec![Value::int(1)],
            todo: vec![Expr::int(3)],
        };
        assert_eq!(plug(&odd_total, Expr::int(2)), None);
        let even_total = Frame::Params {
            id: FrameId::Map,
            done: vec![Value::int(1)],
            todo: vec![],
        };
        assert_eq!(
            plug(&even_total, Expr::int(2)),
            Some(Expr::Map(vec![(Expr::int(1), Expr::int(2))]))
        );
    }

    #[test]
    fn guard_frame_becomes_a_two_clause_case() {
        let rest = vec![Clause::new(
            vec![Pattern::var("Y")],
            Expr::atom("true"),
            Expr::int(2),
        )];
        let f = Frame::CaseGuard {
            scrutinee: vec![Value::int(7)],
            patterns: vec![Pattern::var("X")],
            body: Expr::int(1),
            rest: rest.clone(),
        };
        let expected = Expr::case(
            Expr::Values(vec![]),
            vec![
                Clause::new(vec![], Expr::atom("g"), Expr::int(1)),
                Clause::new(
                    vec![],
                    Expr::atom("true"),
                    Expr::case(Expr::Values(vec![Expr::int(7)]), rest),
                ),
            ],
        );
        assert_eq!(plug(&f, Expr::atom("g")), Some(expected));
    }
}
