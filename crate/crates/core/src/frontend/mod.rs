//! Concrete syntax: lexing, parsing, printing, and the command-line driver.

use thiserror::Error;

use crate::ast::{names_of, Expr, FunDef, FunId, Value};

pub mod cli;
mod lexer;
mod parser;
mod print;

pub use parser::{parse, parse_expr, parse_pattern, parse_value};
pub use print::{
    print_config, print_exception, print_expr, print_frame, print_pattern, print_redex,
    print_result, print_stack, print_value, print_values, HOLE,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Lex {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("line {line}, column {column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A top-level function definition and where it starts in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub def: FunDef,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceUnit {
    Expr(Expr),
    /// Mutually recursive definitions; the last one is the default entry.
    Module(Vec<Definition>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no definition named {0:?}")]
pub struct MissingEntry(pub FunId);

impl SourceUnit {
    fn defs(&self) -> Vec<FunDef> {
        match self {
            SourceUnit::Expr(_) => Vec::new(),
            SourceUnit::Module(ds) => ds.iter().map(|d| d.def.clone()).collect(),
        }
    }

    fn entry_id(&self, entry: Option<&FunId>) -> Result<Option<FunId>, MissingEntry> {
        match (self, entry) {
            (SourceUnit::Expr(_), _) => Ok(None),
            (SourceUnit::Module(_), Some(f)) => {
                if names_of(&self.defs()).contains(&f.clone().into()) {
                    Ok(Some(f.clone()))
                } else {
                    Err(MissingEntry(f.clone()))
                }
            }
            (SourceUnit::Module(ds), None) => Ok(ds.last().map(|d| d.def.id.clone())),
        }
    }

    /// The unit as a closed expression: a bare expression as written, or
    /// `letrec defs in 'f'/k` for the entry function of a module.
    pub fn to_expr(&self, entry: Option<&FunId>) -> Result<Expr, MissingEntry> {
        match self {
            SourceUnit::Expr(e) => Ok(e.clone()),
            SourceUnit::Module(_) => {
                let f = self
                    .entry_id(entry)?
                    .expect("modules have at least one definition");
                Ok(Expr::letrec(self.defs(), Expr::Val(Value::FunId(f))))
            }
        }
    }

    /// Applies the entry to `args`. A bare expression without arguments is
    /// evaluated as is.
    pub fn applied_to(&self, entry: Option<&FunId>, args: &[Value]) -> Result<Expr, MissingEntry> {
        let args: Vec<Expr> = args.iter().cloned().map(Expr::Val).collect();
        match self {
            SourceUnit::Expr(e) if args.is_empty() => Ok(e.clone()),
            SourceUnit::Expr(e) => Ok(Expr::apply(e.clone(), args)),
            SourceUnit::Module(_) => {
                let f = self
                    .entry_id(entry)?
                    .expect("modules have at least one definition");
                Ok(Expr::letrec(
                    self.defs(),
                    Expr::apply(Expr::Val(Value::FunId(f)), args),
                ))
            }
        }
    }
}

/// Parses `name/arity`, with or without quotes around the name.
pub fn parse_fun_id(text: &str) -> Option<FunId> {
    let (name, arity) = text.rsplit_once('/')?;
    let name = name
        .strip_prefix('\'')
        .and_then(|n| n.strip_suffix('\''))
        .unwrap_or(name);
    Some(FunId::new(name, arity.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_entry_defaults_to_the_last_definition() {
        let unit = parse("'g'/0 = fun () -> 1\n'f'/1 = fun (X) -> X").unwrap();
        let e = unit.to_expr(None).unwrap();
        let Expr::LetRec { body, .. } = e else {
            panic!()
        };
        assert_eq!(*body, Expr::fun_id("f", 1));
        assert!(unit.to_expr(Some(&FunId::new("h", 0))).is_err());
        assert!(unit.to_expr(Some(&FunId::new("g", 0))).is_ok());
    }

    #[test]
    fn fun_id_text() {
        assert_eq!(parse_fun_id("'f'/1"), Some(FunId::new("f", 1)));
        assert_eq!(parse_fun_id("g/0"), Some(FunId::new("g", 0)));
        assert_eq!(parse_fun_id("g"), None);
    }
}
