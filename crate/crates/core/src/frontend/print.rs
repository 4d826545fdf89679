//! Rendering of terms in the concrete syntax accepted by the parser.
//!
//! Inside expressions, compound values (lists, tuples, maps and closures
//! that are already values) carry a `#` prefix so that they read back as
//! values rather than as constructor expressions.

use std::fmt::Write;

use crate::ast::{Clause, EvalResult, Exception, Expr, FunDef, Pattern, Value, Var};
use crate::machine::{plug, Configuration, Frame, FrameId, FrameStack, Redex};

pub const HOLE: &str = "□";

fn atom_text(out: &mut String, a: &str) {
    out.push('\'');
    for c in a.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
}

fn sep<T>(out: &mut String, items: &[T], mut each: impl FnMut(&mut String, &T)) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        each(out, item);
    }
}

fn vars(out: &mut String, xs: &[Var]) {
    sep(out, xs, |o, x| o.push_str(x.as_str()));
}

fn var_list(out: &mut String, xs: &[Var]) {
    out.push('<');
    vars(out, xs);
    out.push('>');
}

fn value(out: &mut String, v: &Value) {
    match v {
        Value::Int(i) => write!(out, "{i}").unwrap(),
        Value::Atom(a) => atom_text(out, a.as_str()),
        Value::Var(x) => out.push_str(x.as_str()),
        Value::FunId(f) => {
            atom_text(out, f.name.as_str());
            write!(out, "/{}", f.arity).unwrap();
        }
        Value::Nil => out.push_str("[]"),
        Value::Cons(..) => {
            out.push('[');
            let mut cur = v;
            let mut first = true;
            while let Value::Cons(h, t) = cur {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                value(out, h);
                cur = t;
            }
            if *cur != Value::Nil {
                out.push_str(" | ");
                value(out, cur);
            }
            out.push(']');
        }
        Value::Tuple(vs) => {
            out.push('{');
            sep(out, vs, value);
            out.push('}');
        }
        Value::Map(pairs) => {
            out.push_str("~{");
            sep(out, pairs, |o, (k, v)| {
                value(o, k);
                o.push_str(" => ");
                value(o, v);
            });
            out.push_str("}~");
        }
        Value::Closure(c) => {
            out.push_str("clos([");
            sep(out, &c.ext, def);
            out.push_str("], [");
            vars(out, &c.params);
            out.push_str("], ");
            expr(out, &c.body);
            out.push(')');
        }
    }
}

fn def(out: &mut String, d: &FunDef) {
    atom_text(out, d.id.name.as_str());
    write!(out, "/{} = fun (", d.id.arity).unwrap();
    vars(out, &d.params);
    out.push_str(") -> ");
    expr(out, &d.body);
}

fn pattern(out: &mut String, p: &Pattern) {
    match p {
        Pattern::Int(i) => write!(out, "{i}").unwrap(),
        Pattern::Atom(a) => atom_text(out, a.as_str()),
        Pattern::Var(x) => out.push_str(x.as_str()),
        Pattern::Nil => out.push_str("[]"),
        Pattern::Cons(..) => {
            out.push('[');
            let mut cur = p;
            let mut first = true;
            while let Pattern::Cons(h, t) = cur {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                pattern(out, h);
                cur = t;
            }
            if *cur != Pattern::Nil {
                out.push_str(" | ");
                pattern(out, cur);
            }
            out.push(']');
        }
        Pattern::Tuple(ps) => {
            out.push('{');
            sep(out, ps, pattern);
            out.push('}');
        }
        Pattern::Map(pairs) => {
            out.push_str("~{");
            sep(out, pairs, |o, (k, v)| {
                pattern(o, k);
                o.push_str(" => ");
                pattern(o, v);
            });
            out.push_str("}~");
        }
    }
}

fn clause(out: &mut String, cl: &Clause) {
    out.push('<');
    sep(out, &cl.patterns, pattern);
    out.push_str("> when ");
    expr(out, &cl.guard);
    out.push_str(" -> ");
    expr(out, &cl.body);
}

fn args(out: &mut String, es: &[Expr]) {
    out.push('(');
    sep(out, es, expr);
    out.push(')');
}

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Val(v) => {
            if matches!(
                v,
                Value::Cons(..) | Value::Tuple(_) | Value::Map(_) | Value::Closure(_)
            ) {
                out.push('#');
            }
            value(out, v);
        }
        Expr::Fun { params, body } => {
            out.push_str("fun (");
            vars(out, params);
            out.push_str(") -> ");
            expr(out, body);
        }
        Expr::Values(es) => {
            out.push('<');
            sep(out, es, expr);
            out.push('>');
        }
        Expr::Cons(..) => {
            out.push('[');
            let mut cur = e;
            let mut first = true;
            while let Expr::Cons(h, t) = cur {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                expr(out, h);
                cur = t;
            }
            if *cur != Expr::nil() {
                out.push_str(" | ");
                expr(out, cur);
            }
            out.push(']');
        }
        Expr::Tuple(es) => {
            out.push('{');
            sep(out, es, expr);
            out.push('}');
        }
        Expr::Map(pairs) => {
            out.push_str("~{");
            sep(out, pairs, |o, (k, v)| {
                expr(o, k);
                o.push_str(" => ");
                expr(o, v);
            });
            out.push_str("}~");
        }
        Expr::Call {
            module,
            function,
            args: es,
        } => {
            out.push_str("call ");
            expr(out, module);
            out.push(':');
            expr(out, function);
            args(out, es);
        }
        Expr::PrimOp { name, args: es } => {
            out.push_str("primop ");
            atom_text(out, name.as_str());
            args(out, es);
        }
        Expr::Apply { fun, args: es } => {
            out.push_str("apply ");
            expr(out, fun);
            args(out, es);
        }
        Expr::Case { scrutinee, clauses } => {
            out.push_str("case ");
            expr(out, scrutinee);
            out.push_str(" of");
            for cl in clauses {
                out.push(' ');
                clause(out, cl);
            }
            out.push_str(" end");
        }
        Expr::Let { vars, bind, body } => {
            out.push_str("let ");
            var_list(out, vars);
            out.push_str(" = ");
            expr(out, bind);
            out.push_str(" in ");
            expr(out, body);
        }
        Expr::Seq(a, b) => {
            out.push_str("do ");
            expr(out, a);
            out.push(' ');
            expr(out, b);
        }
        Expr::LetRec { defs, body } => {
            out.push_str("letrec ");
            for d in defs {
                def(out, d);
                out.push(' ');
            }
            out.push_str("in ");
            expr(out, body);
        }
        Expr::Try {
            expr: e1,
            vars,
            body,
            catch_vars,
            handler,
        } => {
            out.push_str("try ");
            expr(out, e1);
            out.push_str(" of ");
            var_list(out, vars);
            out.push_str(" -> ");
            expr(out, body);
            out.push_str(" catch ");
            var_list(out, catch_vars);
            out.push_str(" -> ");
            expr(out, handler);
        }
    }
}

fn with<T: ?Sized>(x: &T, f: fn(&mut String, &T)) -> String {
    let mut out = String::new();
    f(&mut out, x);
    out
}

pub fn print_expr(e: &Expr) -> String {
    with(e, expr)
}

pub fn print_value(v: &Value) -> String {
    with(v, value)
}

pub fn print_pattern(p: &Pattern) -> String {
    with(p, pattern)
}

pub fn print_values(vs: &[Value]) -> String {
    let mut out = String::from("<");
    sep(&mut out, vs, value);
    out.push('>');
    out
}

pub fn print_exception(x: &Exception) -> String {
    let mut out = String::from("{");
    atom_text(&mut out, x.class.as_str());
    out.push(',');
    value(&mut out, &x.reason);
    out.push(',');
    value(&mut out, &x.details);
    out.push_str("}^X");
    out
}

/// `<1,2>` for value sequences, `{'error','badarg',0}^X` for exceptions.
pub fn print_result(r: &EvalResult) -> String {
    match r {
        EvalResult::Values(vs) => {
            let mut out = String::from("<");
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                value(&mut out, v);
            }
            out.push('>');
            out
        }
        EvalResult::Exc(x) => print_exception(x),
    }
}

pub fn print_redex(r: &Redex) -> String {
    match r {
        Redex::Expr(e) => print_expr(e),
        Redex::Values(vs) => print_result(&EvalResult::Values(vs.clone())),
        Redex::Exc(x) => print_exception(x),
        Redex::Box => HOLE.to_string(),
    }
}

pub fn print_frame(f: &Frame) -> String {
    let hole = Expr::Val(Value::Var(Var::new(HOLE)));
    match f {
        Frame::CaseGuard {
            scrutinee,
            patterns,
            body,
            rest,
        } => {
            let mut out = String::from("case ");
            out.push_str(&print_values(scrutinee));
            out.push_str(" of ");
            clause(&mut out, &Clause::new(patterns.clone(), hole, body.clone()));
            for cl in rest {
                out.push(' ');
                clause(&mut out, cl);
            }
            out.push_str(" end");
            out
        }
        Frame::Params {
            id: FrameId::Map,
            done,
            todo,
        } => match plug(f, hole) {
            Some(e) => print_expr(&e),
            None => {
                let mut out = String::from("~{");
                sep(&mut out, done, value);
                if !done.is_empty() {
                    out.push_str(", ");
                }
                out.push_str(HOLE);
                for e in todo {
                    out.push_str(", ");
                    expr(&mut out, e);
                }
                out.push_str("}~");
                out
            }
        },
        other => print_expr(&plug(other, hole).expect("only map frames can fail to plug")),
    }
}

/// `F1 :: F2 :: ε`, top frame first.
pub fn print_stack(k: &FrameStack) -> String {
    let mut out = String::new();
    for f in k.iter() {
        out.push_str(&print_frame(f));
        out.push_str(" :: ");
    }
    out.push('ε');
    out
}

pub fn print_config(c: &Configuration) -> String {
    format!("⟨{}, {}⟩", print_stack(&c.stack), print_redex(&c.redex))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_sequences() {
        assert_eq!(print_expr(&Expr::int(1)), "1");
        assert_eq!(
            print_result(&EvalResult::Values(vec![Value::int(1), Value::int(2)])),
            "<1,2>"
        );
    }

    #[test]
    fn if_clause_exception() {
        assert_eq!(
            print_result(&EvalResult::Exc(Exception::if_clause())),
            "{'error','if_clause',{}}^X"
        );
    }

    #[test]
    fn lists_use_sugar() {
        let l = Value::list([Value::int(1), Value::int(2)]);
        assert_eq!(print_value(&l), "[1, 2]");
        assert_eq!(
            print_value(&Value::cons(Value::int(1), Value::int(2))),
            "[1 | 2]"
        );
        assert_eq!(print_expr(&Expr::Val(l)), "#[1, 2]");
    }

    #[test]
    fn atoms_are_escaped() {
        assert_eq!(print_value(&Value::atom("it's")), r"'it\'s'");
    }

    #[test]
    fn frames_show_the_hole() {
        let k = FrameStack::from_top_first([Frame::SeqFirst(Expr::int(2))]);
        assert_eq!(print_stack(&k), "do □ 2 :: ε");
        assert_eq!(
            print_config(&Configuration::new(k, Redex::Box)),
            "⟨do □ 2 :: ε, □⟩"
        );
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::frontend::{parse_expr, parse_pattern, parse_value};
    use crate::gen::Gen;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn printing_is_a_right_inverse_of_parsing(seed in any::<u64>()) {
            let mut gen = Gen::new(seed);
            let scope = [gen.fresh_var()];
            let e = gen.expr(3, &scope);
            prop_assert_eq!(parse_expr(&print_expr(&e)).unwrap(), e);
            let v = gen.value(3);
            prop_assert_eq!(parse_value(&print_value(&v)).unwrap(), v);
            let p = gen.pattern(3);
            prop_assert_eq!(parse_pattern(&print_pattern(&p)).unwrap(), p);
        }
    }
}
