//! The frame stack machine.
//!
//! A configuration pairs a stack of frames (evaluation contexts with one
//! hole) with the redex currently being reduced. [`step`] performs exactly
//! one reduction; [`eval_star`] iterates it under a fuel bound.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::ast::{
    names_of, Atom, Clause, Closure, EvalResult, Exception, Expr, FunDef, Name, Pattern, Term,
    Value, Var,
};
use crate::subst::{Substitutable, Substitution};

mod plug;
mod rules;
mod run;

pub use plug::plug;
pub use rules::{applicable_rules, step, step_rule, StepOutcome};
pub use run::{eval_star, eval_traced, eval_with, terminates, RunOutcome, Termination, TraceStep};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Redex {
    Expr(Expr),
    /// A value sequence `<v1, ..., vn>`.
    Values(Vec<Value>),
    Exc(Exception),
    /// The placeholder that opens a pending parameter list.
    Box,
}

impl Redex {
    pub fn from_result(r: EvalResult) -> Self {
        match r {
            EvalResult::Values(vs) => Redex::Values(vs),
            EvalResult::Exc(x) => Redex::Exc(x),
        }
    }

    /// The result this redex denotes, if it is a value sequence or exception.
    pub fn as_result(&self) -> Option<EvalResult> {
        match self {
            Redex::Values(vs) => Some(EvalResult::Values(vs.clone())),
            Redex::Exc(x) => Some(EvalResult::Exc(x.clone())),
            _ => None,
        }
    }

    /// The single value of a singleton sequence.
    pub fn singleton(&self) -> Option<&Value> {
        match self {
            Redex::Values(vs) if vs.len() == 1 => Some(&vs[0]),
            _ => None,
        }
    }
}

impl From<Expr> for Redex {
    fn from(e: Expr) -> Self {
        Redex::Expr(e)
    }
}

impl Substitutable for Redex {
    fn substitute(&self, s: &Substitution) -> Self {
        match self {
            Redex::Expr(e) => Redex::Expr(s.apply_expr(e)),
            Redex::Values(vs) => Redex::Values(vs.iter().map(|v| s.apply_value(v)).collect()),
            Redex::Exc(x) => Redex::Exc(Exception::new(
                x.class,
                s.apply_value(&x.reason),
                s.apply_value(&x.details),
            )),
            Redex::Box => Redex::Box,
        }
    }
}

impl Term for Redex {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Redex::Expr(e) => e.collect_free(bound, out),
            Redex::Values(vs) => vs.iter().for_each(|v| v.collect_free(bound, out)),
            Redex::Exc(x) => {
                x.reason.collect_free(bound, out);
                x.details.collect_free(bound, out);
            }
            Redex::Box => {}
        }
    }

    fn well_formed(&self) -> bool {
        match self {
            Redex::Expr(e) => e.well_formed(),
            Redex::Values(vs) => vs.iter().all(Value::well_formed),
            Redex::Exc(x) => x.reason.well_formed() && x.details.well_formed(),
            Redex::Box => true,
        }
    }
}

/// What a parameter list frame computes once all its arguments are values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FrameId {
    Tuple,
    Values,
    Map,
    PrimOp(Atom),
    Call(Value, Value),
    App(Value),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Frame {
    /// `id(v1, ..., vk, □, e_k+2, ..., en)`
    Params {
        id: FrameId,
        done: Vec<Value>,
        todo: Vec<Expr>,
    },
    /// `[e1 | □]`
    ConsTail(Expr),
    /// `[□ | v2]`
    ConsHead(Value),
    /// `call □:ef(args)`
    CallModule { function: Expr, args: Vec<Expr> },
    /// `call vm:□(args)`
    CallFunction { module: Value, args: Vec<Expr> },
    /// `apply □(args)`
    AppFn { args: Vec<Expr> },
    /// `case □ of clauses end`
    CaseScrutinee(Vec<Clause>),
    /// `case vs of ps when □ -> body; rest end`, with the match bindings
    /// already substituted into `body`.
    CaseGuard {
        scrutinee: Vec<Value>,
        patterns: Vec<Pattern>,
        body: Expr,
        rest: Vec<Clause>,
    },
    /// `let <vars> = □ in body`
    LetBind { vars: Vec<Var>, body: Expr },
    /// `do □ second`
    SeqFirst(Expr),
    /// `try □ of <vars> -> body catch <c, r, d> -> handler`
    TryFirst {
        vars: Vec<Var>,
        body: Expr,
        catch_vars: [Var; 3],
        handler: Expr,
    },
}

impl Frame {
    /// An expression with the same free names as the frame.
    fn shape(&self) -> Expr {
        match self {
            Frame::Params { id, done, todo } => {
                let mut items: Vec<Expr> = match id {
                    FrameId::Call(m, f) => vec![Expr::Val(m.clone()), Expr::Val(f.clone())],
                    FrameId::App(f) => vec![Expr::Val(f.clone())],
                    _ => Vec::new(),
                };
                items.extend(done.iter().cloned().map(Expr::Val));
                items.extend(todo.iter().cloned());
                Expr::Tuple(items)
            }
            other => plug(other, Expr::nil()).expect("only map parameter frames can fail to plug"),
        }
    }
}

impl Term for Frame {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        self.shape().collect_free(bound, out)
    }

    fn well_formed(&self) -> bool {
        self.shape().well_formed()
    }
}

/// Stored bottom first, so pushing and popping the top frame is cheap.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FrameStack {
    frames: Vec<Frame>,
}

impl FrameStack {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a stack from frames listed top first.
    pub fn from_top_first(frames: impl IntoIterator<Item = Frame>) -> Self {
        let mut frames: Vec<Frame> = frames.into_iter().collect();
        frames.reverse();
        FrameStack { frames }
    }

    pub fn push(&mut self, f: Frame) {
        self.frames.push(f);
    }

    pub fn pop(&mut self) -> Option<Frame> {
        self.frames.pop()
    }

    pub fn top(&self) -> Option<&Frame> {
        self.frames.last()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frames from the top down.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Frame> + ExactSizeIterator {
        self.frames.iter().rev()
    }
}

impl Term for FrameStack {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        self.frames.iter().for_each(|f| f.collect_free(bound, out))
    }

    fn well_formed(&self) -> bool {
        self.frames.iter().all(Frame::well_formed)
    }
}

/// `upper ++ lower`: the frames of `upper` sit on top of those of `lower`.
pub fn stack_concat(upper: &FrameStack, lower: &FrameStack) -> FrameStack {
    let mut frames = lower.frames.clone();
    frames.extend(upper.frames.iter().cloned());
    FrameStack { frames }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    pub stack: FrameStack,
    pub redex: Redex,
}

impl Configuration {
    pub fn new(stack: FrameStack, redex: impl Into<Redex>) -> Self {
        Configuration {
            stack,
            redex: redex.into(),
        }
    }

    /// `⟨ε, e⟩`
    pub fn initial(e: Expr) -> Self {
        Self::new(FrameStack::empty(), e)
    }

    pub fn is_closed(&self) -> bool {
        crate::ast::is_closed(&self.stack) && crate::ast::is_closed(&self.redex)
    }
}

/// The reduction rules, one variant per rule of the semantics.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Rule {
    SConsTail,
    SLet,
    SSeq,
    SApp,
    SCallMod,
    SPrimOp,
    SVals,
    STuple,
    SMap,
    SCase,
    SConsHead,
    SCallFun,
    SCallParam,
    SAppParam,
    SCaseFail,
    SCaseSuccess,
    SCaseFalse,
    SParams0,
    SParams,
    PMap0,
    PFun,
    PLetRec,
    PValue,
    PParams0,
    PParams,
    PCons,
    PCaseTrue,
    PLet,
    PSeq,
    ExcCase,
    STry,
    PTry,
    ExcTry,
    ExcProp,
}

impl Rule {
    pub const ALL: [Rule; 34] = [
        Rule::SConsTail,
        Rule::SLet,
        Rule::SSeq,
        Rule::SApp,
        Rule::SCallMod,
        Rule::SPrimOp,
        Rule::SVals,
        Rule::STuple,
        Rule::SMap,
        Rule::SCase,
        Rule::SConsHead,
        Rule::SCallFun,
        Rule::SCallParam,
        Rule::SAppParam,
        Rule::SCaseFail,
        Rule::SCaseSuccess,
        Rule::SCaseFalse,
        Rule::SParams0,
        Rule::SParams,
        Rule::PMap0,
        Rule::PFun,
        Rule::PLetRec,
        Rule::PValue,
        Rule::PParams0,
        Rule::PParams,
        Rule::PCons,
        Rule::PCaseTrue,
        Rule::PLet,
        Rule::PSeq,
        Rule::ExcCase,
        Rule::STry,
        Rule::PTry,
        Rule::ExcTry,
        Rule::ExcProp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::SConsTail => "SConsTail",
            Rule::SLet => "SLet",
            Rule::SSeq => "SSeq",
            Rule::SApp => "SApp",
            Rule::SCallMod => "SCallMod",
            Rule::SPrimOp => "SPrimOp",
            Rule::SVals => "SVals",
            Rule::STuple => "STuple",
            Rule::SMap => "SMap",
            Rule::SCase => "SCase",
            Rule::SConsHead => "SConsHead",
            Rule::SCallFun => "SCallFun",
            Rule::SCallParam => "SCallParam",
            Rule::SAppParam => "SAppParam",
            Rule::SCaseFail => "SCaseFail",
            Rule::SCaseSuccess => "SCaseSuccess",
            Rule::SCaseFalse => "SCaseFalse",
            Rule::SParams0 => "SParams0",
            Rule::SParams => "SParams",
            Rule::PMap0 => "PMap0",
            Rule::PFun => "PFun",
            Rule::PLetRec => "PLetRec",
            Rule::PValue => "PValue",
            Rule::PParams0 => "PParams0",
            Rule::PParams => "PParams",
            Rule::PCons => "PCons",
            Rule::PCaseTrue => "PCaseTrue",
            Rule::PLet => "PLet",
            Rule::PSeq => "PSeq",
            Rule::ExcCase => "ExcCase",
            Rule::STry => "STry",
            Rule::PTry => "PTry",
            Rule::ExcTry => "ExcTry",
            Rule::ExcProp => "ExcProp",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps every definition `f/k` of `ext` to a closure carrying all of `ext`.
pub fn mk_closlist(ext: &[FunDef]) -> Substitution {
    let mut s = Substitution::new();
    if ext.is_empty() {
        return s;
    }
    let shared = std::sync::Arc::new(ext.to_vec());
    for d in ext {
        let clos = Closure {
            ext: shared.clone(),
            params: d.params.clone(),
            body: std::sync::Arc::new(d.body.clone()),
        };
        s.insert_trusted(Name::FunId(d.id.clone()), Value::Closure(clos));
    }
    debug_assert_eq!(s.domain(), names_of(ext));
    s
}
