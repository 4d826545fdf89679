use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::{Definition, ParseError, SourceUnit};
use crate::ast::{
    free_names, Atom, Clause, Closure, Expr, FunDef, FunId, Name, Pattern, Value, Var,
};

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

const EXPR_START: &[&str] = &[
    "an integer",
    "an atom",
    "a variable",
    "'['",
    "'{'",
    "'~'",
    "'<'",
    "'('",
    "'#'",
    "'fun'",
    "'call'",
    "'primop'",
    "'apply'",
    "'case'",
    "'let'",
    "'letrec'",
    "'do'",
    "'try'",
];

const VALUE_START: &[&str] = &[
    "an integer",
    "an atom",
    "a variable",
    "'['",
    "'{'",
    "'~'",
    "'clos'",
];

const PATTERN_START: &[&str] = &["an integer", "an atom", "a variable", "'['", "'{'", "'~'"];

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.at + n).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at.min(self.toks.len() - 1)].pos
    }

    /// Always advances, so that a failed match can step back with `at -= 1`.
    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        self.at += 1;
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> PResult<T> {
        let pos = self.pos();
        Err(ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn invalid<T>(&self, pos: Pos, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Invalid {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.unexpected(&[&format!("'{}'", t.symbol())])
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(w) if w == k)
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<()> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&[&format!("'{k}'")])
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected(&["end of input"])
        }
    }

    /// Items separated by commas up to `close`, which is consumed.
    fn comma_list<T>(
        &mut self,
        close: Tok,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(&close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            if self.eat(&close) {
                return Ok(out);
            }
            return self.unexpected(&["','", &format!("'{}'", close.symbol())]);
        }
    }

    fn var(&mut self) -> PResult<Var> {
        match self.peek().clone() {
            Tok::Var(x) => {
                self.bump();
                Ok(Var::new(x))
            }
            _ => self.unexpected(&["a variable"]),
        }
    }

    fn arity(&mut self) -> PResult<usize> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => match n.to_usize() {
                Some(k) => Ok(k),
                None => self.invalid(pos, "function arity must be a nonnegative integer"),
            },
            _ => {
                self.at -= 1;
                self.unexpected(&["an integer arity"])
            }
        }
    }

    /// `<X, Y>` or a single variable.
    fn var_list(&mut self) -> PResult<Vec<Var>> {
        if self.eat(&Tok::LAngle) {
            self.comma_list(Tok::RAngle, Self::var)
        } else if matches!(self.peek(), Tok::Var(_)) {
            Ok(vec![self.var()?])
        } else {
            self.unexpected(&["'<'", "a variable"])
        }
    }

    fn params(&mut self) -> PResult<Vec<Var>> {
        self.expect(Tok::LParen)?;
        self.comma_list(Tok::RParen, Self::var)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        self.comma_list(Tok::RParen, Self::expr)
    }

    /// `'f'/k = fun (X1, ..., Xk) -> body`
    fn definition(&mut self) -> PResult<FunDef> {
        let pos = self.pos();
        let name = match self.bump() {
            Tok::Atom(a) => a,
            _ => {
                self.at -= 1;
                return self.unexpected(&["a function name"]);
            }
        };
        self.expect(Tok::Slash)?;
        let arity = self.arity()?;
        self.expect(Tok::Eq)?;
        self.expect_keyword("fun")?;
        let params = self.params()?;
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        if params.len() != arity {
            return self.invalid(
                pos,
                format!(
                    "'{name}'/{arity} is defined with {} parameters",
                    params.len()
                ),
            );
        }
        Ok(FunDef {
            id: FunId::new(&name, arity),
            params,
            body,
        })
    }

    fn definitions_until(&mut self, stop: impl Fn(&Tok) -> bool) -> PResult<Vec<(FunDef, Pos)>> {
        let mut defs: Vec<(FunDef, Pos)> = Vec::new();
        while !stop(self.peek()) {
            let pos = self.pos();
            let d = self.definition()?;
            if defs.iter().any(|(e, _)| e.id == d.id) {
                return self.invalid(pos, format!("{:?} is defined twice", d.id));
            }
            defs.push((d, pos));
            self.eat(&Tok::Comma);
        }
        Ok(defs)
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Atom(_) | Tok::Var(_) => Ok(Expr::Val(self.leaf_value()?)),
            Tok::Hash => {
                self.bump();
                Ok(Expr::Val(self.value()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBracket => {
                self.bump();
                if self.eat(&Tok::RBracket) {
                    return Ok(Expr::nil());
                }
                let mut heads = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    heads.push(self.expr()?);
                }
                let tail = if self.eat(&Tok::Pipe) {
                    self.expr()?
                } else {
                    Expr::nil()
                };
                self.expect(Tok::RBracket)?;
                Ok(heads.into_iter().rev().fold(tail, |t, h| Expr::cons(h, t)))
            }
            Tok::LBrace => {
                self.bump();
                Ok(Expr::Tuple(self.comma_list(Tok::RBrace, Self::expr)?))
            }
            Tok::Tilde => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let pairs = self.comma_list(Tok::RBrace, |p| {
                    let k = p.expr()?;
                    p.expect(Tok::FatArrow)?;
                    Ok((k, p.expr()?))
                })?;
                self.expect(Tok::Tilde)?;
                Ok(Expr::Map(pairs))
            }
            Tok::LAngle => {
                self.bump();
                Ok(Expr::Values(self.comma_list(Tok::RAngle, Self::expr)?))
            }
            Tok::Keyword(k) => self.keyword_expr(&k),
            _ => self.unexpected(EXPR_START),
        }
    }

    fn keyword_expr(&mut self, k: &str) -> PResult<Expr> {
        let pos = self.pos();
        match k {
            "clos" => return Ok(Expr::Val(self.value()?)),
            "fun" | "call" | "primop" | "apply" | "case" | "let" | "letrec" | "do" | "try" => {}
            _ => return self.unexpected(EXPR_START),
        }
        self.bump();
        Ok(match k {
            "fun" => {
                let params = self.params()?;
                self.expect(Tok::Arrow)?;
                Expr::fun(params, self.expr()?)
            }
            "call" => {
                let module = self.expr()?;
                self.expect(Tok::Colon)?;
                let function = self.expr()?;
                let args = self.args()?;
                Expr::Call {
                    module: Box::new(module),
                    function: Box::new(function),
                    args,
                }
            }
            "primop" => {
                let name = match self.bump() {
                    Tok::Atom(a) => Atom::new(a),
                    _ => {
                        self.at -= 1;
                        return self.unexpected(&["an atom"]);
                    }
                };
                Expr::PrimOp {
                    name,
                    args: self.args()?,
                }
            }
            "apply" => {
                let f = self.expr()?;
                Expr::apply(f, self.args()?)
            }
            "case" => {
                let scrutinee = self.expr()?;
                self.expect_keyword("of")?;
                let mut clauses = Vec::new();
                while !self.is_keyword("end") {
                    clauses.push(self.clause()?);
                    self.eat(&Tok::Semi);
                }
                self.bump();
                if let Some(w) = clauses.first().map(|c| c.patterns.len()) {
                    if clauses.iter().any(|c| c.patterns.len() != w) {
                        return self
                            .invalid(pos, "case clauses have different numbers of patterns");
                    }
                }
                Expr::case(scrutinee, clauses)
            }
            "let" => {
                let vars = self.var_list()?;
                self.expect(Tok::Eq)?;
                let bind = self.expr()?;
                self.expect_keyword("in")?;
                Expr::let_(vars, bind, self.expr()?)
            }
            "letrec" => {
                let defs = self.definitions_until(|t| matches!(t, Tok::Keyword(w) if w == "in"))?;
                self.expect_keyword("in")?;
                Expr::letrec(defs.into_iter().map(|(d, _)| d).collect(), self.expr()?)
            }
            "do" => {
                let first = self.expr()?;
                Expr::seq(first, self.expr()?)
            }
            "try" => {
                let expr = self.expr()?;
                self.expect_keyword("of")?;
                let vars = self.var_list()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                self.expect_keyword("catch")?;
                let catch_pos = self.pos();
                let mut catch = self.var_list()?;
                self.expect(Tok::Arrow)?;
                let handler = self.expr()?;
                if catch.len() == 2 {
                    catch.push(fresh_var(&handler, &catch));
                }
                let Ok(catch_vars) = <[Var; 3]>::try_from(catch) else {
                    return self.invalid(catch_pos, "a catch clause binds two or three variables");
                };
                Expr::try_(expr, vars, body, catch_vars, handler)
            }
            _ => unreachable!(),
        })
    }

    fn clause(&mut self) -> PResult<Clause> {
        let patterns = if self.eat(&Tok::LAngle) {
            self.comma_list(Tok::RAngle, Self::pattern)?
        } else {
            vec![self.pattern()?]
        };
        let guard = if self.is_keyword("when") {
            self.bump();
            self.expr()?
        } else {
            Expr::atom("true")
        };
        self.expect(Tok::Arrow)?;
        Ok(Clause::new(patterns, guard, self.expr()?))
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        match self.bump() {
            Tok::Int(i) => Ok(Pattern::Int(i)),
            Tok::Atom(a) => Ok(Pattern::Atom(Atom::new(a))),
            Tok::Var(x) => Ok(Pattern::Var(Var::new(x))),
            Tok::LBracket => {
                if self.eat(&Tok::RBracket) {
                    return Ok(Pattern::Nil);
                }
                let mut heads = vec![self.pattern()?];
                while self.eat(&Tok::Comma) {
                    heads.push(self.pattern()?);
                }
                let tail = if self.eat(&Tok::Pipe) {
                    self.pattern()?
                } else {
                    Pattern::Nil
                };
                self.expect(Tok::RBracket)?;
                Ok(heads
                    .into_iter()
                    .rev()
                    .fold(tail, |t, h| Pattern::cons(h, t)))
            }
            Tok::LBrace => Ok(Pattern::Tuple(self.comma_list(Tok::RBrace, Self::pattern)?)),
            Tok::Tilde => {
                self.expect(Tok::LBrace)?;
                let pairs = self.comma_list(Tok::RBrace, |p| {
                    let k = p.pattern()?;
                    p.expect(Tok::FatArrow)?;
                    Ok((k, p.pattern()?))
                })?;
                self.expect(Tok::Tilde)?;
                Ok(Pattern::Map(pairs))
            }
            _ => {
                self.at -= 1;
                self.unexpected(PATTERN_START)
            }
        }
    }

    /// Integers, atoms, variables and function identifiers.
    fn leaf_value(&mut self) -> PResult<Value> {
        match self.bump() {
            Tok::Int(i) => Ok(Value::Int(i)),
            Tok::Var(x) => Ok(Value::Var(Var::new(x))),
            Tok::Atom(a) => {
                if *self.peek() == Tok::Slash && matches!(self.peek_at(1), Tok::Int(_)) {
                    self.bump();
                    let arity = self.arity()?;
                    Ok(Value::FunId(FunId::new(a, arity)))
                } else {
                    Ok(Value::Atom(Atom::new(a)))
                }
            }
            _ => {
                self.at -= 1;
                self.unexpected(VALUE_START)
            }
        }
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek() {
            Tok::Int(_) | Tok::Atom(_) | Tok::Var(_) => self.leaf_value(),
            Tok::LBracket => {
                self.bump();
                if self.eat(&Tok::RBracket) {
                    return Ok(Value::Nil);
                }
                let mut heads = vec![self.value()?];
                while self.eat(&Tok::Comma) {
                    heads.push(self.value()?);
                }
                let tail = if self.eat(&Tok::Pipe) {
                    self.value()?
                } else {
                    Value::Nil
                };
                self.expect(Tok::RBracket)?;
                Ok(heads.into_iter().rev().fold(tail, |t, h| Value::cons(h, t)))
            }
            Tok::LBrace => {
                self.bump();
                Ok(Value::Tuple(self.comma_list(Tok::RBrace, Self::value)?))
            }
            Tok::Tilde => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let pairs = self.comma_list(Tok::RBrace, |p| {
                    let k = p.value()?;
                    p.expect(Tok::FatArrow)?;
                    Ok((k, p.value()?))
                })?;
                self.expect(Tok::Tilde)?;
                Ok(Value::map(pairs))
            }
            Tok::Keyword(k) if k == "clos" => {
                self.bump();
                self.expect(Tok::LParen)?;
                self.expect(Tok::LBracket)?;
                let defs = self.definitions_until(|t| *t == Tok::RBracket)?;
                self.bump();
                self.expect(Tok::Comma)?;
                self.expect(Tok::LBracket)?;
                let params = self.comma_list(Tok::RBracket, Self::var)?;
                self.expect(Tok::Comma)?;
                let body = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Value::Closure(Closure::new(
                    defs.into_iter().map(|(d, _)| d).collect(),
                    params,
                    body,
                )))
            }
            _ => self.unexpected(VALUE_START),
        }
    }
}

/// A variable different from `taken` and from every free name of `e`.
fn fresh_var(e: &Expr, taken: &[Var]) -> Var {
    let free = free_names(e);
    let used = |x: &Var| taken.contains(x) || free.contains(&Name::Var(x.clone()));
    (0..)
        .map(|i| {
            Var::new(if i == 0 {
                "_Details".to_string()
            } else {
                format!("_Details{i}")
            })
        })
        .find(|x| !used(x))
        .expect("some name is unused")
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a value written without the `#` prefix, as in results and
/// command-line arguments.
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let mut p = Parser::new(src)?;
    let v = p.value()?;
    p.expect_eof()?;
    Ok(v)
}

pub fn parse_pattern(src: &str) -> Result<Pattern, ParseError> {
    let mut p = Parser::new(src)?;
    let pat = p.pattern()?;
    p.expect_eof()?;
    Ok(pat)
}

/// A file is either a bare expression or a sequence of function definitions.
pub fn parse(src: &str) -> Result<SourceUnit, ParseError> {
    let mut p = Parser::new(src)?;
    let is_module = matches!(
        (p.peek_at(0), p.peek_at(1), p.peek_at(2), p.peek_at(3)),
        (Tok::Atom(_), Tok::Slash, Tok::Int(_), Tok::Eq)
    );
    if !is_module {
        let e = p.expr()?;
        p.expect_eof()?;
        return Ok(SourceUnit::Expr(e));
    }
    let defs = p.definitions_until(|t| *t == Tok::Eof)?;
    let names: BTreeSet<FunId> = defs.iter().map(|(d, _)| d.id.clone()).collect();
    debug_assert_eq!(names.len(), defs.len());
    Ok(SourceUnit::Module(
        defs.into_iter()
            .map(|(def, pos)| Definition {
                def,
                line: pos.line,
                column: pos.column,
            })
            .collect(),
    ))
}
