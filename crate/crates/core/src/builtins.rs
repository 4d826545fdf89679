//! Results of completed parameter lists: closure application, data
//! construction, built-in functions and primitive operations.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ast::{EvalResult, ExcClass, Exception, Name, Value};
use crate::machine::{mk_closlist, FrameId, Redex};

/// Computes the redex a parameter list frame reduces to once every argument
/// is a value. Never returns [`Redex::Box`].
pub fn eval(id: &FrameId, args: Vec<Value>) -> Redex {
    match id {
        FrameId::Values => Redex::Values(args),
        FrameId::Tuple => Redex::Values(vec![Value::Tuple(args)]),
        FrameId::Map => {
            if !args.len().is_multiple_of(2) {
                return Redex::Exc(Exception::error("badarg", Value::list(args)));
            }
            let mut it = args.into_iter();
            let mut pairs = Vec::new();
            while let (Some(k), Some(v)) = (it.next(), it.next()) {
                pairs.push((k, v));
            }
            Redex::Values(vec![Value::map(pairs)])
        }
        FrameId::App(f) => apply(f, args),
        FrameId::Call(m, f) => Redex::from_result(call(m, f, &args)),
        FrameId::PrimOp(name) => Redex::from_result(primop(name.as_str(), &args)),
    }
}

fn apply(f: &Value, args: Vec<Value>) -> Redex {
    let Value::Closure(c) = f else {
        return Redex::Exc(Exception::error("badfun", f.clone()));
    };
    if c.arity() != args.len() {
        return Redex::Exc(Exception::error("badarity", f.clone()));
    }
    let mut s = mk_closlist(&c.ext);
    for (x, v) in c.params.iter().zip(args) {
        s.insert_trusted(Name::Var(x.clone()), v);
    }
    Redex::Expr(s.apply_expr(&c.body))
}

/// Calls `m:f(args)`. A missing entry raises `undef` with `{m, f, arity}`.
pub fn call(m: &Value, f: &Value, args: &[Value]) -> EvalResult {
    if let (Value::Atom(ma), Value::Atom(fa)) = (m, f) {
        if let Some(bif) = bif_table().get(&(ma.as_str(), fa.as_str(), args.len())) {
            return bif(args);
        }
    }
    let mfa = Value::tuple([m.clone(), f.clone(), Value::int(args.len() as i64)]);
    EvalResult::Exc(Exception::error("undef", mfa))
}

fn primop(name: &str, args: &[Value]) -> EvalResult {
    match (name, args) {
        ("match_fail", [v]) => {
            let (reason, details) = match v {
                Value::Tuple(items) if !items.is_empty() => {
                    let details = match &items[1..] {
                        [d] => d.clone(),
                        rest => Value::Tuple(rest.to_vec()),
                    };
                    (items[0].clone(), details)
                }
                other => (other.clone(), Value::Tuple(vec![])),
            };
            EvalResult::Exc(Exception::new(ExcClass::Error, reason, details))
        }
        ("raise", [class, reason]) | ("raise", [class, reason, _]) => {
            match ExcClass::from_value(class) {
                Some(c) => {
                    let details = args.get(2).cloned().unwrap_or(Value::Tuple(vec![]));
                    EvalResult::Exc(Exception::new(c, reason.clone(), details))
                }
                None => badarg(class),
            }
        }
        _ => EvalResult::Exc(Exception::error("undef", Value::atom(name))),
    }
}

pub type Bif = fn(&[Value]) -> EvalResult;

fn ok(v: Value) -> EvalResult {
    EvalResult::Values(vec![v])
}

fn badarg(v: &Value) -> EvalResult {
    EvalResult::Exc(Exception::error("badarg", v.clone()))
}

/// `erlang:'=='`: structural equality, which for integer-only data is
/// numeric equality.
pub fn bif_equal(a: &Value, b: &Value) -> Value {
    Value::boolean(a == b)
}

fn ints(args: &[Value]) -> Result<(&BigInt, &BigInt), EvalResult> {
    match args {
        [Value::Int(a), Value::Int(b)] => Ok((a, b)),
        [Value::Int(_), other] | [other, _] => Err(badarg(other)),
        _ => unreachable!("arithmetic BIFs are binary"),
    }
}

fn arith(args: &[Value], op: impl Fn(&BigInt, &BigInt) -> Option<BigInt>) -> EvalResult {
    match ints(args) {
        Ok((a, b)) => match op(a, b) {
            Some(r) => ok(Value::Int(r)),
            None => EvalResult::Exc(Exception::error("badarith", Value::list(args.to_vec()))),
        },
        Err(e) => e,
    }
}

fn compare(args: &[Value], pred: fn(std::cmp::Ordering) -> bool) -> EvalResult {
    ok(Value::boolean(pred(args[0].cmp(&args[1]))))
}

fn boolean(v: &Value) -> Option<bool> {
    match v {
        Value::Atom(a) if a.as_str() == "true" => Some(true),
        Value::Atom(a) if a.as_str() == "false" => Some(false),
        _ => None,
    }
}

fn logic(args: &[Value], op: fn(bool, bool) -> bool) -> EvalResult {
    match (boolean(&args[0]), boolean(&args[1])) {
        (Some(a), Some(b)) => ok(Value::boolean(op(a, b))),
        (None, _) => badarg(&args[0]),
        (_, None) => badarg(&args[1]),
    }
}

fn type_test(args: &[Value], test: fn(&Value) -> bool) -> EvalResult {
    ok(Value::boolean(test(&args[0])))
}

fn bif_length(args: &[Value]) -> EvalResult {
    match args[0].list_items() {
        Some(items) => ok(Value::int(items.len() as i64)),
        None => badarg(&args[0]),
    }
}

fn bif_hd(args: &[Value]) -> EvalResult {
    match &args[0] {
        Value::Cons(h, _) => ok((**h).clone()),
        other => badarg(other),
    }
}

fn bif_tl(args: &[Value]) -> EvalResult {
    match &args[0] {
        Value::Cons(_, t) => ok((**t).clone()),
        other => badarg(other),
    }
}

fn bif_element(args: &[Value]) -> EvalResult {
    let (Value::Int(n), Value::Tuple(items)) = (&args[0], &args[1]) else {
        return badarg(&Value::list(args.to_vec()));
    };
    match n.to_usize().filter(|i| (1..=items.len()).contains(i)) {
        Some(i) => ok(items[i - 1].clone()),
        None => badarg(&args[0]),
    }
}

fn bif_tuple_size(args: &[Value]) -> EvalResult {
    match &args[0] {
        Value::Tuple(items) => ok(Value::int(items.len() as i64)),
        other => badarg(other),
    }
}

fn bif_negate(args: &[Value]) -> EvalResult {
    match &args[0] {
        Value::Int(i) => ok(Value::Int(-i)),
        other => badarg(other),
    }
}

fn bif_not(args: &[Value]) -> EvalResult {
    match boolean(&args[0]) {
        Some(b) => ok(Value::boolean(!b)),
        None => badarg(&args[0]),
    }
}

fn bif_abs(args: &[Value]) -> EvalResult {
    match &args[0] {
        Value::Int(i) => ok(Value::Int(i.abs())),
        other => badarg(other),
    }
}

type BifKey = (&'static str, &'static str, usize);

/// The built-in functions reachable through `call`, keyed by
/// module, function and arity.
pub fn bif_table() -> &'static HashMap<BifKey, Bif> {
    static TABLE: OnceLock<HashMap<BifKey, Bif>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let entries: [(&str, usize, Bif); 32] = [
            ("+", 2, |a| arith(a, |x, y| Some(x + y))),
            ("-", 2, |a| arith(a, |x, y| Some(x - y))),
            ("*", 2, |a| arith(a, |x, y| Some(x * y))),
            // Erlang's div and rem truncate towards zero, as BigInt does.
            ("div", 2, |a| arith(a, |x, y| (!y.is_zero()).then(|| x / y))),
            ("rem", 2, |a| arith(a, |x, y| (!y.is_zero()).then(|| x % y))),
            ("-", 1, bif_negate),
            ("abs", 1, bif_abs),
            ("==", 2, |a| ok(bif_equal(&a[0], &a[1]))),
            ("/=", 2, |a| ok(Value::boolean(a[0] != a[1]))),
            ("=:=", 2, |a| ok(bif_equal(&a[0], &a[1]))),
            ("=/=", 2, |a| ok(Value::boolean(a[0] != a[1]))),
            ("<", 2, |a| compare(a, |o| o.is_lt())),
            ("=<", 2, |a| compare(a, |o| o.is_le())),
            (">", 2, |a| compare(a, |o| o.is_gt())),
            (">=", 2, |a| compare(a, |o| o.is_ge())),
            ("length", 1, bif_length),
            ("hd", 1, bif_hd),
            ("tl", 1, bif_tl),
            ("element", 2, bif_element),
            ("tuple_size", 1, bif_tuple_size),
            ("and", 2, |a| logic(a, |x, y| x && y)),
            ("or", 2, |a| logic(a, |x, y| x || y)),
            ("xor", 2, |a| logic(a, |x, y| x != y)),
            ("not", 1, bif_not),
            ("is_integer", 1, |a| {
                type_test(a, |v| matches!(v, Value::Int(_)))
            }),
            ("is_atom", 1, |a| {
                type_test(a, |v| matches!(v, Value::Atom(_)))
            }),
            ("is_list", 1, |a| {
                type_test(a, |v| matches!(v, Value::Nil | Value::Cons(..)))
            }),
            ("is_tuple", 1, |a| {
                type_test(a, |v| matches!(v, Value::Tuple(_)))
            }),
            ("is_map", 1, |a| {
                type_test(a, |v| matches!(v, Value::Map(_)))
            }),
            ("is_function", 1, |a| {
                type_test(a, |v| matches!(v, Value::Closure(_)))
            }),
            ("is_boolean", 1, |a| type_test(a, |v| boolean(v).is_some())),
            ("is_number", 1, |a| {
                type_test(a, |v| matches!(v, Value::Int(_)))
            }),
        ];
        entries
            .into_iter()
            .map(|(f, arity, bif)| (("erlang", f, arity), bif))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Closure, Expr, Var};

    fn erl(f: &str, args: &[Value]) -> EvalResult {
        call(&Value::atom("erlang"), &Value::atom(f), args)
    }

    fn vals(v: Value) -> EvalResult {
        EvalResult::Values(vec![v])
    }

    fn reason(r: &EvalResult) -> Option<&str> {
        match r {
            EvalResult::Exc(x) => match &x.reason {
                Value::Atom(a) => Some(a.as_str()),
                _ => None,
            },
            _ => None,
        }
    }

    #[test]
    fn tuple_and_values_construction() {
        assert_eq!(
            eval(&FrameId::Tuple, vec![Value::int(1), Value::int(2)]),
            Redex::Values(vec![Value::tuple([Value::int(1), Value::int(2)])])
        );
        let args = vec![Value::int(1), Value::atom("a")];
        assert_eq!(eval(&FrameId::Values, args.clone()), Redex::Values(args));
    }

    #[test]
    fn map_construction_keeps_the_last_duplicate() {
        // Oracle: sequential insertion into a sorted association list.
        let args = [1, 2, 1, 3].map(Value::int).to_vec();
        let mut assoc: Vec<(Value, Value)> = Vec::new();
        for pair in args.chunks(2) {
            match assoc.iter_mut().find(|(k, _)| *k == pair[0]) {
                Some(slot) => slot.1 = pair[1].clone(),
                None => assoc.push((pair[0].clone(), pair[1].clone())),
            }
        }
        assoc.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(
            eval(&FrameId::Map, args),
            Redex::Values(vec![Value::Map(assoc)])
        );
    }

    #[test]
    fn length_of_lists_and_non_lists() {
        assert_eq!(erl("length", &[Value::Nil]), vals(Value::int(0)));
        assert_eq!(reason(&erl("length", &[Value::int(0)])), Some("badarg"));
        assert_eq!(
            reason(&erl("length", &[Value::cons(Value::int(1), Value::int(2))])),
            Some("badarg")
        );
    }

    #[test]
    fn equality_bif() {
        assert_eq!(
            bif_equal(&Value::int(0), &Value::int(0)),
            Value::atom("true")
        );
        assert_eq!(
            bif_equal(&Value::atom("a"), &Value::atom("b")),
            Value::atom("false")
        );
        let l = Value::list([Value::int(1)]);
        assert_eq!(bif_equal(&l, &l.clone()), Value::atom("true"));
    }

    #[test]
    fn arithmetic_and_its_errors() {
        assert_eq!(
            erl("+", &[Value::int(2), Value::int(3)]),
            vals(Value::int(5))
        );
        assert_eq!(
            erl("div", &[Value::int(-7), Value::int(2)]),
            vals(Value::int(-3))
        );
        assert_eq!(
            erl("rem", &[Value::int(-7), Value::int(2)]),
            vals(Value::int(-1))
        );
        assert_eq!(
            reason(&erl("div", &[Value::int(1), Value::int(0)])),
            Some("badarith")
        );
        assert_eq!(
            erl("+", &[Value::int(1), Value::atom("a")]),
            EvalResult::Exc(Exception::error("badarg", Value::atom("a")))
        );
    }

    #[test]
    fn missing_functions_are_undef_with_mfa() {
        assert_eq!(
            erl("nope", &[Value::int(1)]),
            EvalResult::Exc(Exception::error(
                "undef",
                Value::tuple([Value::atom("erlang"), Value::atom("nope"), Value::int(1)])
            ))
        );
        assert_eq!(
            reason(&call(&Value::int(1), &Value::atom("f"), &[])),
            Some("undef")
        );
    }

    #[test]
    fn closure_application() {
        let id = Value::Closure(Closure::new(vec![], vec![Var::new("X")], Expr::var("X")));
        assert_eq!(
            eval(&FrameId::App(id.clone()), vec![Value::int(4)]),
            Redex::Expr(Expr::int(4))
        );
        assert_eq!(
            eval(&FrameId::App(id.clone()), vec![]),
            Redex::Exc(Exception::error("badarity", id))
        );
        assert_eq!(
            eval(&FrameId::App(Value::int(1)), vec![]),
            Redex::Exc(Exception::error("badfun", Value::int(1)))
        );
    }

    #[test]
    fn primops() {
        let mf = eval(
            &FrameId::PrimOp("match_fail".into()),
            vec![Value::tuple([
                Value::atom("function_clause"),
                Value::int(3),
            ])],
        );
        assert_eq!(
            mf,
            Redex::Exc(Exception::error("function_clause", Value::int(3)))
        );
        let raised = eval(
            &FrameId::PrimOp("raise".into()),
            vec![Value::atom("throw"), Value::atom("x")],
        );
        assert_eq!(
            raised,
            Redex::Exc(Exception::new(
                ExcClass::Throw,
                Value::atom("x"),
                Value::tuple([])
            ))
        );
        assert_eq!(
            eval(&FrameId::PrimOp("mystery".into()), vec![]),
            Redex::Exc(Exception::error("undef", Value::atom("mystery")))
        );
    }

    #[test]
    fn element_bounds() {
        let t = Value::tuple([Value::atom("a"), Value::atom("b")]);
        assert_eq!(
            erl("element", &[Value::int(2), t.clone()]),
            vals(Value::atom("b"))
        );
        assert_eq!(
            reason(&erl("element", &[Value::int(3), t.clone()])),
            Some("badarg")
        );
        assert_eq!(reason(&erl("element", &[Value::int(0), t])), Some("badarg"));
    }

    #[test]
    fn boolean_operators_reject_non_booleans() {
        assert_eq!(
            erl("and", &[Value::atom("true"), Value::atom("false")]),
            vals(Value::atom("false"))
        );
        assert_eq!(
            reason(&erl("or", &[Value::int(1), Value::atom("true")])),
            Some("badarg")
        );
        assert_eq!(
            erl("not", &[Value::atom("false")]),
            vals(Value::atom("true"))
        );
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::gen::Gen;
    use proptest::prelude::*;

    fn erlang(f: &str, args: &[Value]) -> EvalResult {
        call(&Value::atom("erlang"), &Value::atom(f), args)
    }

    fn truth(f: &str, a: &Value, b: &Value) -> bool {
        erlang(f, &[a.clone(), b.clone()]) == EvalResult::Values(vec![Value::atom("true")])
    }

    proptest! {
        #[test]
        fn comparison_is_a_total_order(seed in any::<u64>()) {
            let mut gen = Gen::new(seed);
            let (a, b) = (gen.first_order_value(2), gen.first_order_value(2));
            let outcomes = [truth("<", &a, &b), truth("==", &a, &b), truth(">", &a, &b)];
            prop_assert_eq!(outcomes.iter().filter(|t| **t).count(), 1);
            prop_assert_eq!(truth("=<", &a, &b), outcomes[0] || outcomes[1]);
            prop_assert_eq!(truth("/=", &a, &b), !outcomes[1]);
        }

        #[test]
        fn arithmetic_matches_wide_integers(a in any::<i64>(), b in any::<i64>()) {
            let int = |i: i128| EvalResult::Values(vec![Value::Int(i.into())]);
            let (x, y) = (Value::int(a), Value::int(b));
            let (wa, wb) = (a as i128, b as i128);
            prop_assert_eq!(erlang("+", &[x.clone(), y.clone()]), int(wa + wb));
            prop_assert_eq!(erlang("-", &[x.clone(), y.clone()]), int(wa - wb));
            prop_assert_eq!(erlang("*", &[x.clone(), y.clone()]), int(wa * wb));
            if b != 0 {
                prop_assert_eq!(erlang("div", &[x.clone(), y.clone()]), int(wa / wb));
                prop_assert_eq!(erlang("rem", &[x, y]), int(wa % wb));
            }
        }
    }
}
