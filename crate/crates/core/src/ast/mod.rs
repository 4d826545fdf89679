//! The term language of sequential Core Erlang.
//!
//! Values and non-values are separate categories: an [`Expr`] is either an
//! injected [`Value`] (`Expr::Val`) or one of the non-value constructs. Values
//! may be open (they can mention variables and function identifiers), which
//! is what substitution operates on.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

mod order;
mod scope;

pub use scope::{check_scope, free_names, is_closed, names_of, Term};

/// An interned atom. Compared lexically by its text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(text: impl AsRef<str>) -> Self {
        Atom(Arc::from(text.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::new(s)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}'", self.0)
    }
}

/// A variable name. Never empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    /// Panics if `name` is empty.
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        assert!(!name.is_empty(), "variable names must be nonempty");
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A function identifier `f/k`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunId {
    pub name: Atom,
    pub arity: usize,
}

impl FunId {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        FunId {
            name: Atom::new(name),
            arity,
        }
    }
}

impl fmt::Debug for FunId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.name, self.arity)
    }
}

/// Variables and function identifiers share one namespace of names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Name {
    Var(Var),
    FunId(FunId),
}

impl From<Var> for Name {
    fn from(v: Var) -> Self {
        Name::Var(v)
    }
}

impl From<FunId> for Name {
    fn from(f: FunId) -> Self {
        Name::FunId(f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Pattern {
    Int(BigInt),
    Atom(Atom),
    Var(Var),
    Cons(Box<Pattern>, Box<Pattern>),
    Nil,
    Tuple(Vec<Pattern>),
    /// Pairs in written order; patterns are syntax, so keys are not deduplicated.
    Map(Vec<(Pattern, Pattern)>),
}

impl Pattern {
    pub fn var(name: &str) -> Self {
        Pattern::Var(Var::new(name))
    }

    pub fn int(i: i64) -> Self {
        Pattern::Int(BigInt::from(i))
    }

    pub fn atom(a: &str) -> Self {
        Pattern::Atom(Atom::new(a))
    }

    pub fn cons(head: Pattern, tail: Pattern) -> Self {
        Pattern::Cons(Box::new(head), Box::new(tail))
    }

    /// The value a variable-free pattern denotes, or `None` if it has variables.
    pub fn to_value(&self) -> Option<Value> {
        Some(match self {
            Pattern::Int(i) => Value::Int(i.clone()),
            Pattern::Atom(a) => Value::Atom(a.clone()),
            Pattern::Var(_) => return None,
            Pattern::Nil => Value::Nil,
            Pattern::Cons(h, t) => Value::Cons(Box::new(h.to_value()?), Box::new(t.to_value()?)),
            Pattern::Tuple(ps) => {
                Value::Tuple(ps.iter().map(Pattern::to_value).collect::<Option<_>>()?)
            }
            Pattern::Map(pairs) => Value::map(
                pairs
                    .iter()
                    .map(|(k, v)| Some((k.to_value()?, v.to_value()?)))
                    .collect::<Option<Vec<_>>>()?,
            ),
        })
    }

    /// Reads the pattern as an (open) value, variables included.
    pub fn to_open_value(&self) -> Value {
        match self {
            Pattern::Int(i) => Value::Int(i.clone()),
            Pattern::Atom(a) => Value::Atom(a.clone()),
            Pattern::Var(x) => Value::Var(x.clone()),
            Pattern::Nil => Value::Nil,
            Pattern::Cons(h, t) => {
                Value::Cons(Box::new(h.to_open_value()), Box::new(t.to_open_value()))
            }
            Pattern::Tuple(ps) => Value::Tuple(ps.iter().map(Pattern::to_open_value).collect()),
            Pattern::Map(pairs) => Value::map(
                pairs
                    .iter()
                    .map(|(k, v)| (k.to_open_value(), v.to_open_value())),
            ),
        }
    }
}

/// A closure item `f/k = fun(x1, ..., xk) -> e`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FunDef {
    pub id: FunId,
    pub params: Vec<Var>,
    pub body: Expr,
}

impl FunDef {
    /// Builds a definition whose identifier arity is the parameter count.
    pub fn new(name: &str, params: Vec<Var>, body: Expr) -> Self {
        FunDef {
            id: FunId::new(name, params.len()),
            params,
            body,
        }
    }
}

/// `clos(ext, [x1, ..., xn], e)`: a function value together with the
/// recursive definitions reinstalled whenever it is applied.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Closure {
    pub ext: Arc<Vec<FunDef>>,
    pub params: Vec<Var>,
    pub body: Arc<Expr>,
}

impl Closure {
    pub fn new(ext: Vec<FunDef>, params: Vec<Var>, body: Expr) -> Self {
        Closure {
            ext: Arc::new(ext),
            params,
            body: Arc::new(body),
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Int(BigInt),
    Atom(Atom),
    Var(Var),
    FunId(FunId),
    Closure(Closure),
    Nil,
    Cons(Box<Value>, Box<Value>),
    Tuple(Vec<Value>),
    /// Keys strictly increasing in the value order; build with [`Value::map`].
    Map(Vec<(Value, Value)>),
}

impl Value {
    pub fn int(i: i64) -> Self {
        Value::Int(BigInt::from(i))
    }

    pub fn atom(a: &str) -> Self {
        Value::Atom(Atom::new(a))
    }

    pub fn var(x: &str) -> Self {
        Value::Var(Var::new(x))
    }

    pub fn boolean(b: bool) -> Self {
        Value::atom(if b { "true" } else { "false" })
    }

    pub fn cons(head: Value, tail: Value) -> Self {
        Value::Cons(Box::new(head), Box::new(tail))
    }

    /// A proper list.
    pub fn list(items: impl IntoIterator<Item = Value>) -> Self {
        let items: Vec<Value> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(Value::Nil, |tail, head| Value::cons(head, tail))
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Tuple(items.into_iter().collect())
    }

    /// Builds a canonical map: a later occurrence of a key overrides earlier
    /// ones and keys are sorted by the value order.
    pub fn map(pairs: impl IntoIterator<Item = (Value, Value)>) -> Self {
        let mut canonical = BTreeMap::new();
        for (k, v) in pairs {
            canonical.insert(k, v);
        }
        Value::Map(canonical.into_iter().collect())
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Value::Atom(a) if a.as_str() == name)
    }

    /// True when no closure occurs anywhere inside the value.
    pub fn is_closure_free(&self) -> bool {
        match self {
            Value::Closure(_) => false,
            Value::Cons(h, t) => h.is_closure_free() && t.is_closure_free(),
            Value::Tuple(vs) => vs.iter().all(Value::is_closure_free),
            Value::Map(pairs) => pairs
                .iter()
                .all(|(k, v)| k.is_closure_free() && v.is_closure_free()),
            _ => true,
        }
    }

    /// Elements of a proper list, or `None` for anything else.
    pub fn list_items(&self) -> Option<Vec<&Value>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Nil => return Some(items),
                Value::Cons(h, t) => {
                    items.push(h.as_ref());
                    cur = t;
                }
                _ => return None,
            }
        }
    }
}

impl From<Value> for Expr {
    fn from(v: Value) -> Self {
        Expr::Val(v)
    }
}

/// `ps when e^g -> e^b`
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Clause {
    pub patterns: Vec<Pattern>,
    pub guard: Expr,
    pub body: Expr,
}

impl Clause {
    pub fn new(patterns: Vec<Pattern>, guard: Expr, body: Expr) -> Self {
        Clause {
            patterns,
            guard,
            body,
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Val(Value),
    Fun {
        params: Vec<Var>,
        body: Box<Expr>,
    },
    Values(Vec<Expr>),
    Cons(Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    Map(Vec<(Expr, Expr)>),
    Call {
        module: Box<Expr>,
        function: Box<Expr>,
        args: Vec<Expr>,
    },
    PrimOp {
        name: Atom,
        args: Vec<Expr>,
    },
    Apply {
        fun: Box<Expr>,
        args: Vec<Expr>,
    },
    Case {
        scrutinee: Box<Expr>,
        clauses: Vec<Clause>,
    },
    Let {
        vars: Vec<Var>,
        bind: Box<Expr>,
        body: Box<Expr>,
    },
    Seq(Box<Expr>, Box<Expr>),
    LetRec {
        defs: Vec<FunDef>,
        body: Box<Expr>,
    },
    /// `try e1 of <vars> -> body catch <class, reason, details> -> handler`
    Try {
        expr: Box<Expr>,
        vars: Vec<Var>,
        body: Box<Expr>,
        catch_vars: [Var; 3],
        handler: Box<Expr>,
    },
}

impl Expr {
    pub fn int(i: i64) -> Self {
        Expr::Val(Value::int(i))
    }

    pub fn atom(a: &str) -> Self {
        Expr::Val(Value::atom(a))
    }

    pub fn var(x: &str) -> Self {
        Expr::Val(Value::var(x))
    }

    pub fn nil() -> Self {
        Expr::Val(Value::Nil)
    }

    pub fn fun_id(name: &str, arity: usize) -> Self {
        Expr::Val(Value::FunId(FunId::new(name, arity)))
    }

    pub fn cons(head: Expr, tail: Expr) -> Self {
        Expr::Cons(Box::new(head), Box::new(tail))
    }

    pub fn fun(params: Vec<Var>, body: Expr) -> Self {
        Expr::Fun {
            params,
            body: Box::new(body),
        }
    }

    pub fn call(module: &str, function: &str, args: Vec<Expr>) -> Self {
        Expr::Call {
            module: Box::new(Expr::atom(module)),
            function: Box::new(Expr::atom(function)),
            args,
        }
    }

    pub fn primop(name: &str, args: Vec<Expr>) -> Self {
        Expr::PrimOp {
            name: Atom::new(name),
            args,
        }
    }

    pub fn apply(fun: Expr, args: Vec<Expr>) -> Self {
        Expr::Apply {
            fun: Box::new(fun),
            args,
        }
    }

    pub fn case(scrutinee: Expr, clauses: Vec<Clause>) -> Self {
        Expr::Case {
            scrutinee: Box::new(scrutinee),
            clauses,
        }
    }

    pub fn let_(vars: Vec<Var>, bind: Expr, body: Expr) -> Self {
        Expr::Let {
            vars,
            bind: Box::new(bind),
            body: Box::new(body),
        }
    }

    pub fn seq(first: Expr, second: Expr) -> Self {
        Expr::Seq(Box::new(first), Box::new(second))
    }

    pub fn letrec(defs: Vec<FunDef>, body: Expr) -> Self {
        Expr::LetRec {
            defs,
            body: Box::new(body),
        }
    }

    pub fn try_(
        expr: Expr,
        vars: Vec<Var>,
        body: Expr,
        catch_vars: [Var; 3],
        handler: Expr,
    ) -> Self {
        Expr::Try {
            expr: Box::new(expr),
            vars,
            body: Box::new(body),
            catch_vars,
            handler: Box::new(handler),
        }
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Expr::Val(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExcClass {
    Throw,
    Exit,
    Error,
}

impl ExcClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ExcClass::Throw => "throw",
            ExcClass::Exit => "exit",
            ExcClass::Error => "error",
        }
    }

    pub fn to_value(self) -> Value {
        Value::atom(self.as_str())
    }

    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Atom(a) => match a.as_str() {
                "throw" => Some(ExcClass::Throw),
                "exit" => Some(ExcClass::Exit),
                "error" => Some(ExcClass::Error),
                _ => None,
            },
            _ => None,
        }
    }
}

/// `{class, reason, details}^X`
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exception {
    pub class: ExcClass,
    pub reason: Value,
    pub details: Value,
}

impl Exception {
    pub fn new(class: ExcClass, reason: Value, details: Value) -> Self {
        Exception {
            class,
            reason,
            details,
        }
    }

    pub fn error(reason: &str, details: Value) -> Self {
        Exception::new(ExcClass::Error, Value::atom(reason), details)
    }

    /// `{error, if_clause, {}}`, raised when no case clause applies.
    pub fn if_clause() -> Self {
        Exception::error("if_clause", Value::Tuple(Vec::new()))
    }
}

/// What a terminating evaluation produces.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum EvalResult {
    Values(Vec<Value>),
    Exc(Exception),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_constructor_dedups_with_later_override_and_sorts() {
        let m = Value::map([
            (Value::int(2), Value::atom("b")),
            (Value::int(1), Value::int(2)),
            (Value::int(1), Value::int(3)),
        ]);
        assert_eq!(
            m,
            Value::Map(vec![
                (Value::int(1), Value::int(3)),
                (Value::int(2), Value::atom("b")),
            ])
        );
    }

    #[test]
    fn ground_patterns_denote_values() {
        let p = Pattern::Tuple(vec![
            Pattern::int(1),
            Pattern::cons(Pattern::atom("a"), Pattern::Nil),
        ]);
        assert_eq!(
            p.to_value(),
            Some(Value::tuple([
                Value::int(1),
                Value::list([Value::atom("a")])
            ]))
        );
        assert_eq!(Pattern::Tuple(vec![Pattern::var("X")]).to_value(), None);
    }

    #[test]
    fn list_items_only_for_proper_lists() {
        let l = Value::list([Value::int(1), Value::int(2)]);
        assert_eq!(l.list_items().map(|v| v.len()), Some(2));
        assert!(Value::cons(Value::int(1), Value::int(2))
            .list_items()
            .is_none());
    }

    #[test]
    #[should_panic]
    fn empty_variable_names_are_rejected() {
        let _ = Var::new("");
    }

    #[test]
    fn exception_classes_round_trip_through_atoms() {
        for c in [ExcClass::Throw, ExcClass::Exit, ExcClass::Error] {
            assert_eq!(ExcClass::from_value(&c.to_value()), Some(c));
        }
        assert_eq!(ExcClass::from_value(&Value::atom("oops")), None);
    }
}
