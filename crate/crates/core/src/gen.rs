//! Seeded random generation of values, patterns, expressions and frames.
//!
//! Everything produced here is closed unless a scope is passed in, and no
//! generated program is recursive, so almost every run terminates.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Atom, Clause, Closure, Expr, FunDef, FunId, Pattern, Value, Var};
use crate::machine::{Frame, FrameId, FrameStack};

const ATOMS: [&str; 6] = ["a", "b", "ok", "true", "false", "error"];

/// Built-in functions the expression generator calls, with their arities.
const BIFS: [(&str, usize); 14] = [
    ("+", 2),
    ("-", 2),
    ("*", 2),
    ("div", 2),
    ("==", 2),
    ("/=", 2),
    ("<", 2),
    ("length", 1),
    ("hd", 1),
    ("tl", 1),
    ("element", 2),
    ("tuple_size", 1),
    ("not", 1),
    ("is_list", 1),
];

/// Values tried first whenever a generator needs closed arguments.
pub fn interesting_values() -> Vec<Value> {
    let id = Closure::new(vec![], vec![Var::new("X")], Expr::var("X"));
    vec![
        Value::Nil,
        Value::list([Value::int(1)]),
        Value::list([Value::int(1), Value::int(2)]),
        Value::int(0),
        Value::int(1),
        Value::atom("a"),
        Value::atom("true"),
        Value::atom("false"),
        Value::tuple([]),
        Value::tuple([Value::int(1), Value::atom("a")]),
        Value::cons(Value::int(1), Value::int(2)),
        Value::map([]),
        Value::map([(Value::int(1), Value::int(2))]),
        Value::Closure(id),
        Value::int(-1),
    ]
}

pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn fresh_var(&mut self) -> Var {
        self.fresh += 1;
        Var::new(format!("V{}", self.fresh))
    }

    fn fresh_vars(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.fresh_var()).collect()
    }

    fn fresh_upto(&mut self, bound: usize) -> Vec<Var> {
        let n = self.below(bound);
        self.fresh_vars(n)
    }

    fn exprs_upto(&mut self, bound: usize, depth: usize, scope: &[Var]) -> Vec<Expr> {
        let n = self.below(bound);
        self.exprs(n, depth, scope)
    }

    fn closure_upto(&mut self, bound: usize, depth: usize) -> Closure {
        let arity = self.below(bound);
        self.closure(arity, depth)
    }

    fn atom(&mut self) -> Atom {
        Atom::new(ATOMS.choose(&mut self.rng).expect("nonempty"))
    }

    fn small_int(&mut self) -> i64 {
        self.rng.gen_range(-2..=3)
    }

    /// A closure-free closed value of nesting depth at most `depth`.
    pub fn first_order_value(&mut self, depth: usize) -> Value {
        self.value_with(depth, false)
    }

    /// A closed value of depth at most `depth`; may contain closures.
    pub fn value(&mut self, depth: usize) -> Value {
        self.value_with(depth, true)
    }

    fn value_with(&mut self, depth: usize, closures: bool) -> Value {
        let kinds = if depth == 0 {
            3
        } else if closures {
            8
        } else {
            7
        };
        match self.below(kinds) {
            0 => Value::int(self.small_int()),
            1 => Value::Atom(self.atom()),
            2 => Value::Nil,
            3 => Value::cons(
                self.value_with(depth - 1, closures),
                self.value_with(depth - 1, closures),
            ),
            4 => {
                let n = self.below(4);
                Value::list(
                    (0..n)
                        .map(|_| self.value_with(depth - 1, closures))
                        .collect::<Vec<_>>(),
                )
            }
            5 => {
                let n = self.below(3);
                Value::Tuple(
                    (0..n)
                        .map(|_| self.value_with(depth - 1, closures))
                        .collect(),
                )
            }
            6 => {
                let n = self.below(3);
                let pairs: Vec<_> = (0..n)
                    .map(|_| {
                        (
                            self.value_with(0, false),
                            self.value_with(depth - 1, closures),
                        )
                    })
                    .collect();
                Value::map(pairs)
            }
            _ => Value::Closure(self.closure_upto(3, depth - 1)),
        }
    }

    /// A closed, non-recursive closure of the given arity.
    pub fn closure(&mut self, arity: usize, depth: usize) -> Closure {
        let params = self.fresh_vars(arity);
        let body = self.expr(depth.min(2), &params);
        Closure::new(vec![], params, body)
    }

    /// A pattern that binds fresh variables only.
    pub fn pattern(&mut self, depth: usize) -> Pattern {
        let kinds = if depth == 0 { 4 } else { 7 };
        match self.below(kinds) {
            0 => Pattern::Var(self.fresh_var()),
            1 => Pattern::int(self.small_int()),
            2 => Pattern::Atom(self.atom()),
            3 => Pattern::Nil,
            4 => Pattern::cons(self.pattern(depth - 1), self.pattern(depth - 1)),
            5 => {
                let n = self.below(3);
                Pattern::Tuple((0..n).map(|_| self.pattern(depth - 1)).collect())
            }
            _ => {
                let key = match self.first_order_value(0) {
                    Value::Int(i) => Pattern::Int(i),
                    Value::Atom(a) => Pattern::Atom(a),
                    _ => Pattern::Nil,
                };
                Pattern::Map(vec![(key, self.pattern(depth - 1))])
            }
        }
    }

    fn leaf(&mut self, scope: &[Var]) -> Expr {
        if !scope.is_empty() && self.chance(0.4) {
            return Expr::Val(Value::Var(scope.choose(&mut self.rng).unwrap().clone()));
        }
        match self.below(6) {
            0 | 1 => Expr::int(self.small_int()),
            2 | 3 => Expr::Val(Value::Atom(self.atom())),
            4 => Expr::nil(),
            _ => Expr::Val(self.first_order_value(1)),
        }
    }

    fn exprs(&mut self, n: usize, depth: usize, scope: &[Var]) -> Vec<Expr> {
        (0..n).map(|_| self.expr(depth, scope)).collect()
    }

    fn extended(scope: &[Var], more: &[Var]) -> Vec<Var> {
        scope.iter().chain(more).cloned().collect()
    }

    /// An expression whose free names all lie in `scope`.
    pub fn expr(&mut self, depth: usize, scope: &[Var]) -> Expr {
        if depth == 0 {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.below(16) {
            0 | 1 => self.leaf(scope),
            2 => {
                let params = self.fresh_upto(3);
                let body = self.expr(d, &Self::extended(scope, &params));
                Expr::fun(params, body)
            }
            3 => {
                let n = self.below(3);
                Expr::Values(self.exprs(n, d, scope))
            }
            4 => Expr::cons(self.expr(d, scope), self.expr(d, scope)),
            5 => {
                let n = self.below(3);
                Expr::Tuple(self.exprs(n, d, scope))
            }
            6 => {
                let n = self.below(3);
                Expr::Map(
                    (0..n)
                        .map(|_| (self.expr(d, scope), self.expr(d, scope)))
                        .collect(),
                )
            }
            7 | 8 => {
                let (f, arity) = *BIFS.choose(&mut self.rng).unwrap();
                let args = self.exprs(arity, d, scope);
                Expr::call("erlang", f, args)
            }
            9 => {
                if self.chance(0.5) {
                    let reason = self.expr(d, scope);
                    Expr::primop(
                        "match_fail",
                        vec![Expr::Tuple(vec![Expr::atom("function_clause"), reason])],
                    )
                } else {
                    let class = ["throw", "error", "exit"].choose(&mut self.rng).unwrap();
                    Expr::primop("raise", vec![Expr::atom(class), self.expr(d, scope)])
                }
            }
            10 => {
                let arity = self.below(3);
                let params = self.fresh_vars(arity);
                let body = self.expr(d, &Self::extended(scope, &params));
                let args = self.exprs(arity, d, scope);
                Expr::apply(Expr::fun(params, body), args)
            }
            11 | 12 => {
                let scrutinee = self.expr(d, scope);
                let n = 1 + self.below(3);
                let clauses = (0..n).map(|_| self.clause(1, d, scope)).collect();
                Expr::case(scrutinee, clauses)
            }
            13 => {
                let n = 1 + self.below(2);
                let vars = self.fresh_vars(n);
                let bind = if n == 1 {
                    self.expr(d, scope)
                } else {
                    Expr::Values(self.exprs(n, d, scope))
                };
                let body = self.expr(d, &Self::extended(scope, &vars));
                Expr::let_(vars, bind, body)
            }
            14 => {
                if self.chance(0.5) {
                    Expr::seq(self.expr(d, scope), self.expr(d, scope))
                } else {
                    let name = format!("f{}", self.below(3));
                    let params = self.fresh_upto(2);
                    let body = self.expr(d, &Self::extended(scope, &params));
                    let arity = params.len();
                    let def = FunDef::new(&name, params, body);
                    let args = self.exprs(arity, d, scope);
                    let call = Expr::apply(Expr::Val(Value::FunId(FunId::new(&name, arity))), args);
                    Expr::letrec(vec![def], call)
                }
            }
            _ => {
                let e = self.expr(d, scope);
                let vars = self.fresh_vars(1);
                let body = self.expr(d, &Self::extended(scope, &vars));
                let catch = self.fresh_vars(3);
                let handler = self.expr(d, &Self::extended(scope, &catch));
                let catch: [Var; 3] = catch.try_into().expect("three catch variables");
                Expr::try_(e, vars, body, catch, handler)
            }
        }
    }

    fn clause(&mut self, width: usize, depth: usize, scope: &[Var]) -> Clause {
        let patterns: Vec<Pattern> = (0..width).map(|_| self.pattern(1)).collect();
        let bound: Vec<Var> = crate::matching::vars_of_all(&patterns)
            .into_iter()
            .collect();
        let inner = Self::extended(scope, &bound);
        let guard = if self.chance(0.7) {
            Expr::atom("true")
        } else {
            self.expr(depth.min(1), &inner)
        };
        Clause::new(patterns, guard, self.expr(depth, &inner))
    }

    pub fn closed_expr(&mut self, depth: usize) -> Expr {
        self.expr(depth, &[])
    }

    fn frame_id(&mut self, depth: usize) -> FrameId {
        match self.below(6) {
            0 => FrameId::Tuple,
            1 => FrameId::Values,
            2 => FrameId::Map,
            3 => FrameId::PrimOp(Atom::new(if self.chance(0.5) {
                "match_fail"
            } else {
                "raise"
            })),
            4 => {
                let (f, _) = *BIFS.choose(&mut self.rng).unwrap();
                FrameId::Call(Value::atom("erlang"), Value::atom(f))
            }
            _ => FrameId::App(Value::Closure(self.closure_upto(3, depth))),
        }
    }

    /// A closed frame of any shape, with embedded expressions up to `depth`.
    pub fn frame(&mut self, depth: usize) -> Frame {
        match self.below(11) {
            0 => {
                let id = self.frame_id(depth);
                let mut done: Vec<Value> = (0..self.below(3)).map(|_| self.value(1)).collect();
                let mut todo = self.exprs_upto(3, depth, &[]);
                if id == FrameId::Map && (done.len() + todo.len()).is_multiple_of(2) {
                    if todo.is_empty() && !done.is_empty() {
                        done.pop();
                    } else {
                        todo.push(self.expr(depth, &[]));
                    }
                }
                Frame::Params { id, done, todo }
            }
            1 => Frame::ConsTail(self.expr(depth, &[])),
            2 => Frame::ConsHead(self.value(1)),
            3 => Frame::CallModule {
                function: self.expr(depth, &[]),
                args: self.exprs_upto(3, depth, &[]),
            },
            4 => Frame::CallFunction {
                module: Value::atom("erlang"),
                args: self.exprs_upto(3, depth, &[]),
            },
            5 => Frame::AppFn {
                args: self.exprs_upto(3, depth, &[]),
            },
            6 => {
                let n = self.below(3);
                Frame::CaseScrutinee((0..n).map(|_| self.clause(1, depth, &[])).collect())
            }
            7 => {
                let patterns = vec![self.pattern(1)];
                let rest = (0..self.below(2))
                    .map(|_| self.clause(1, depth, &[]))
                    .collect();
                Frame::CaseGuard {
                    scrutinee: vec![self.value(1)],
                    patterns,
                    body: self.expr(depth, &[]),
                    rest,
                }
            }
            8 => {
                let vars = self.fresh_vars(1);
                let body = self.expr(depth, &vars);
                Frame::LetBind { vars, body }
            }
            9 => Frame::SeqFirst(self.expr(depth, &[])),
            _ => {
                let vars = self.fresh_vars(1);
                let body = self.expr(depth, &vars);
                let catch = self.fresh_vars(3);
                let handler = self.expr(depth, &catch);
                Frame::TryFirst {
                    vars,
                    body,
                    catch_vars: catch.try_into().expect("three catch variables"),
                    handler,
                }
            }
        }
    }

    /// A closed stack of between 1 and `max_frames` frames.
    pub fn stack(&mut self, max_frames: usize, depth: usize) -> FrameStack {
        let n = 1 + self.below(max_frames.max(1));
        FrameStack::from_top_first((0..n).map(|_| self.frame(depth)).collect::<Vec<_>>())
    }
}
