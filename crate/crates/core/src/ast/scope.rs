//! Free names and the scoping judgement `Γ ⊢ r`.

use std::collections::BTreeSet;

use super::{Clause, Expr, FunDef, Name, Value, Var};
use crate::matching;

/// Syntax that has free names and a well-formedness condition.
pub trait Term {
    /// Adds every name of `self` not listed in `bound` to `out`.
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>);

    /// Arity side conditions: uniform clause width per `case`, and every
    /// function definition declares the arity it actually has.
    fn well_formed(&self) -> bool;
}

pub fn free_names<T: Term + ?Sized>(t: &T) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    t.collect_free(&mut Vec::new(), &mut out);
    out
}

/// `Γ ⊢ t`: every free name is in `gamma`, and `t` is well formed.
pub fn check_scope<T: Term + ?Sized>(gamma: &BTreeSet<Name>, t: &T) -> bool {
    t.well_formed() && free_names(t).is_subset(gamma)
}

pub fn is_closed<T: Term + ?Sized>(t: &T) -> bool {
    check_scope(&BTreeSet::new(), t)
}

/// The function identifiers bound by a list of definitions.
pub fn names_of(ext: &[FunDef]) -> BTreeSet<Name> {
    ext.iter().map(|d| Name::FunId(d.id.clone())).collect()
}

fn under<R>(
    bound: &mut Vec<Name>,
    names: impl IntoIterator<Item = Name>,
    f: impl FnOnce(&mut Vec<Name>) -> R,
) -> R {
    let mark = bound.len();
    bound.extend(names);
    let r = f(bound);
    bound.truncate(mark);
    r
}

fn var_names(vars: &[Var]) -> impl Iterator<Item = Name> + '_ {
    vars.iter().cloned().map(Name::Var)
}

fn defs_free(ext: &[FunDef], bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    let fns = names_of(ext);
    for def in ext {
        under(
            bound,
            fns.iter().cloned().chain(var_names(&def.params)),
            |b| def.body.collect_free(b, out),
        );
    }
}

fn defs_well_formed(ext: &[FunDef]) -> bool {
    ext.iter()
        .all(|d| d.id.arity == d.params.len() && d.body.well_formed())
}

fn clause_free(cl: &Clause, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    let pvars: BTreeSet<Var> = cl.patterns.iter().flat_map(matching::vars).collect();
    under(bound, pvars.into_iter().map(Name::Var), |b| {
        cl.guard.collect_free(b, out);
        cl.body.collect_free(b, out);
    });
}

impl Term for Value {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Value::Int(_) | Value::Atom(_) | Value::Nil => {}
            Value::Var(x) => {
                let n = Name::Var(x.clone());
                if !bound.contains(&n) {
                    out.insert(n);
                }
            }
            Value::FunId(f) => {
                let n = Name::FunId(f.clone());
                if !bound.contains(&n) {
                    out.insert(n);
                }
            }
            Value::Closure(c) => {
                defs_free(&c.ext, bound, out);
                under(
                    bound,
                    names_of(&c.ext).into_iter().chain(var_names(&c.params)),
                    |b| c.body.collect_free(b, out),
                );
            }
            Value::Cons(h, t) => {
                h.collect_free(bound, out);
                t.collect_free(bound, out);
            }
            Value::Tuple(vs) => vs.iter().for_each(|v| v.collect_free(bound, out)),
            Value::Map(pairs) => pairs.iter().for_each(|(k, v)| {
                k.collect_free(bound, out);
                v.collect_free(bound, out);
            }),
        }
    }

    fn well_formed(&self) -> bool {
        match self {
            Value::Closure(c) => defs_well_formed(&c.ext) && c.body.well_formed(),
            Value::Cons(h, t) => h.well_formed() && t.well_formed(),
            Value::Tuple(vs) => vs.iter().all(Value::well_formed),
            Value::Map(pairs) => pairs
                .iter()
                .all(|(k, v)| k.well_formed() && v.well_formed()),
            _ => true,
        }
    }
}

impl Term for Expr {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Val(v) => v.collect_free(bound, out),
            Expr::Fun { params, body } => {
                under(bound, var_names(params), |b| body.collect_free(b, out))
            }
            Expr::Values(es) | Expr::Tuple(es) | Expr::PrimOp { args: es, .. } => {
                es.iter().for_each(|e| e.collect_free(bound, out))
            }
            Expr::Cons(h, t) | Expr::Seq(h, t) => {
                h.collect_free(bound, out);
                t.collect_free(bound, out);
            }
            Expr::Map(pairs) => pairs.iter().for_each(|(k, v)| {
                k.collect_free(bound, out);
                v.collect_free(bound, out);
            }),
            Expr::Call {
                module,
                function,
                args,
            } => {
                module.collect_free(bound, out);
                function.collect_free(bound, out);
                args.iter().for_each(|e| e.collect_free(bound, out));
            }
            Expr::Apply { fun, args } => {
                fun.collect_free(bound, out);
                args.iter().for_each(|e| e.collect_free(bound, out));
            }
            Expr::Case { scrutinee, clauses } => {
                scrutinee.collect_free(bound, out);
                clauses.iter().for_each(|cl| clause_free(cl, bound, out));
            }
            Expr::Let { vars, bind, body } => {
                bind.collect_free(bound, out);
                under(bound, var_names(vars), |b| body.collect_free(b, out));
            }
            Expr::LetRec { defs, body } => {
                defs_free(defs, bound, out);
                under(bound, names_of(defs), |b| body.collect_free(b, out));
            }
            Expr::Try {
                expr,
                vars,
                body,
                catch_vars,
                handler,
            } => {
                expr.collect_free(bound, out);
                under(bound, var_names(vars), |b| body.collect_free(b, out));
                under(bound, var_names(catch_vars), |b| {
                    handler.collect_free(b, out)
                });
            }
        }
    }

    fn well_formed(&self) -> bool {
        match self {
            Expr::Val(v) => v.well_formed(),
            Expr::Fun { body, .. } => body.well_formed(),
            Expr::Values(es) | Expr::Tuple(es) | Expr::PrimOp { args: es, .. } => {
                es.iter().all(Expr::well_formed)
            }
            Expr::Cons(a, b) | Expr::Seq(a, b) => a.well_formed() && b.well_formed(),
            Expr::Map(pairs) => pairs
                .iter()
                .all(|(k, v)| k.well_formed() && v.well_formed()),
            Expr::Call {
                module,
                function,
                args,
            } => {
                module.well_formed() && function.well_formed() && args.iter().all(Expr::well_formed)
            }
            Expr::Apply { fun, args } => fun.well_formed() && args.iter().all(Expr::well_formed),
            Expr::Case { scrutinee, clauses } => {
                let width = clauses.first().map(|cl| cl.patterns.len());
                scrutinee.well_formed()
                    && clauses.iter().all(|cl| {
                        Some(cl.patterns.len()) == width
                            && cl.guard.well_formed()
                            && cl.body.well_formed()
                    })
            }
            Expr::Let { bind, body, .. } => bind.well_formed() && body.well_formed(),
            Expr::LetRec { defs, body } => defs_well_formed(defs) && body.well_formed(),
            Expr::Try {
                expr,
                body,
                handler,
                ..
            } => expr.well_formed() && body.well_formed() && handler.well_formed(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Clause, FunId, Pattern};

    fn v(x: &str) -> Var {
        Var::new(x)
    }

    fn names(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|x| Name::Var(v(x))).collect()
    }

    #[test]
    fn literals_are_closed() {
        assert!(free_names(&Expr::int(1)).is_empty());
    }

    #[test]
    fn let_binds_its_body() {
        let e = Expr::let_(vec![v("X")], Expr::int(1), Expr::var("X"));
        assert!(free_names(&e).is_empty());
        // ...but not its own binding expression
        let e = Expr::let_(vec![v("X")], Expr::var("X"), Expr::var("X"));
        assert_eq!(free_names(&e), names(&["X"]));
    }

    #[test]
    fn application_collects_all_free_names() {
        let e = Expr::apply(Expr::var("F"), vec![Expr::var("F"), Expr::var("G")]);
        assert_eq!(free_names(&e), names(&["F", "G"]));
    }

    #[test]
    fn clause_pattern_vars_bind_guard_and_body() {
        let e = Expr::case(
            Expr::var("S"),
            vec![Clause::new(
                vec![Pattern::cons(Pattern::var("H"), Pattern::var("T"))],
                Expr::var("H"),
                Expr::Tuple(vec![Expr::var("T"), Expr::var("Z")]),
            )],
        );
        assert_eq!(free_names(&e), names(&["S", "Z"]));
    }

    #[test]
    fn letrec_names_bind_definitions_and_body() {
        let f = FunDef::new("f", vec![v("X")], Expr::apply(Expr::fun_id("g", 0), vec![]));
        let g = FunDef::new(
            "g",
            vec![],
            Expr::apply(Expr::fun_id("f", 1), vec![Expr::var("Y")]),
        );
        let e = Expr::letrec(vec![f, g], Expr::fun_id("f", 1));
        assert_eq!(free_names(&e), names(&["Y"]));
    }

    #[test]
    fn try_binds_success_and_catch_vars_separately() {
        let e = Expr::try_(
            Expr::int(1),
            vec![v("R")],
            Expr::var("C"),
            [v("C"), v("Rs"), v("D")],
            Expr::var("R"),
        );
        assert_eq!(free_names(&e), names(&["C", "R"]));
    }

    #[test]
    fn closure_binds_params_and_ext_names() {
        let ext = vec![FunDef::new("f", vec![v("A")], Expr::var("A"))];
        let body = Expr::apply(Expr::fun_id("f", 1), vec![Expr::var("X")]);
        let c = Value::Closure(crate::ast::Closure::new(ext, vec![v("X")], body));
        assert!(is_closed(&c));
    }

    #[test]
    fn funids_are_names() {
        let e = Expr::fun_id("f", 2);
        assert_eq!(
            free_names(&e),
            [Name::FunId(FunId::new("f", 2))].into_iter().collect()
        );
    }

    #[test]
    fn check_scope_examples() {
        assert!(check_scope(&BTreeSet::new(), &Expr::atom("ok")));
        assert!(!check_scope(&BTreeSet::new(), &Expr::var("X")));
        assert!(check_scope(
            &names(&["X"]),
            &Expr::cons(Expr::var("X"), Expr::nil())
        ));
    }

    #[test]
    fn check_scope_rejects_ragged_case_and_bad_arity() {
        let ragged = Expr::case(
            Expr::int(1),
            vec![
                Clause::new(vec![Pattern::var("X")], Expr::atom("true"), Expr::int(1)),
                Clause::new(vec![], Expr::atom("true"), Expr::int(2)),
            ],
        );
        assert!(!is_closed(&ragged));

        let lying = FunDef {
            id: FunId::new("f", 2),
            params: vec![v("X")],
            body: Expr::var("X"),
        };
        assert!(!is_closed(&Expr::letrec(vec![lying], Expr::int(0))));
    }

    #[test]
    fn names_of_examples() {
        assert!(names_of(&[]).is_empty());
        let defs = vec![
            FunDef::new("f", vec![], Expr::atom("ok")),
            FunDef::new("g", vec![v("A"), v("B")], Expr::atom("ok")),
        ];
        let expected: BTreeSet<Name> = [FunId::new("f", 0), FunId::new("g", 2)]
            .into_iter()
            .map(Name::FunId)
            .collect();
        assert_eq!(names_of(&defs), expected);
    }
}
