//! Parallel substitutions of closed values for names.
//!
//! Every range value is closed, so applying a substitution can never capture
//! a name and no renaming is needed. Binders that rebind a name in the domain
//! shadow it: substitution stops descending for that name.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{is_closed, names_of, Clause, Closure, Expr, FunDef, Name, Value, Var};
use crate::matching;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substitution range must be closed, but {0:?} maps to an open value")]
    OpenValue(Name),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Name, Value>,
}

impl Substitution {
    /// The identity substitution.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Value)>) -> Result<Self, SubstError> {
        Substitution::new().compose_update(pairs)
    }

    pub fn bind(&mut self, name: Name, value: Value) -> Result<(), SubstError> {
        if !is_closed(&value) {
            return Err(SubstError::OpenValue(name));
        }
        self.bindings.insert(name, value);
        Ok(())
    }

    /// Right-biased union: bindings in `more` override those already present.
    pub fn compose_update(
        &self,
        more: impl IntoIterator<Item = (Name, Value)>,
    ) -> Result<Self, SubstError> {
        let mut out = self.clone();
        for (name, value) in more {
            out.bind(name, value)?;
        }
        Ok(out)
    }

    /// Adds a binding produced by the machine itself, which is closed
    /// whenever the configuration is.
    pub(crate) fn insert_trusted(&mut self, name: Name, value: Value) -> Option<Value> {
        self.bindings.insert(name, value)
    }

    pub fn get(&self, name: &Name) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn get_var(&self, x: &Var) -> Option<&Value> {
        self.bindings.get(&Name::Var(x.clone()))
    }

    pub fn domain(&self) -> BTreeSet<Name> {
        self.bindings.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `Γ ⊢ σ ⊸ ∅`: the domain covers `gamma` and every range value is closed.
    pub fn subscoped(&self, gamma: &BTreeSet<Name>) -> bool {
        gamma.iter().all(|n| self.bindings.contains_key(n)) && self.bindings.values().all(is_closed)
    }

    /// Drops the names rebound by a binder, borrowing when none of them is in
    /// the domain.
    fn without<'a, I>(&'a self, names: I) -> Cow<'a, Substitution>
    where
        I: IntoIterator<Item = &'a Name> + Clone,
    {
        if names
            .clone()
            .into_iter()
            .any(|n| self.bindings.contains_key(n))
        {
            let mut s = self.clone();
            for n in names {
                s.bindings.remove(n);
            }
            Cow::Owned(s)
        } else {
            Cow::Borrowed(self)
        }
    }

    fn without_vars(&self, vars: &[Var]) -> Cow<'_, Substitution> {
        if vars
            .iter()
            .any(|x| self.bindings.contains_key(&Name::Var(x.clone())))
        {
            let mut s = self.clone();
            for x in vars {
                s.bindings.remove(&Name::Var(x.clone()));
            }
            Cow::Owned(s)
        } else {
            Cow::Borrowed(self)
        }
    }

    pub fn apply_value(&self, v: &Value) -> Value {
        if self.is_empty() {
            return v.clone();
        }
        match v {
            Value::Int(_) | Value::Atom(_) | Value::Nil => v.clone(),
            Value::Var(x) => self.get_var(x).cloned().unwrap_or_else(|| v.clone()),
            Value::FunId(f) => self
                .bindings
                .get(&Name::FunId(f.clone()))
                .cloned()
                .unwrap_or_else(|| v.clone()),
            Value::Closure(c) => Value::Closure(self.apply_closure(c)),
            Value::Cons(h, t) => Value::cons(self.apply_value(h), self.apply_value(t)),
            Value::Tuple(vs) => Value::Tuple(vs.iter().map(|v| self.apply_value(v)).collect()),
            // Substituting into keys may make two of them equal.
            Value::Map(pairs) => Value::map(
                pairs
                    .iter()
                    .map(|(k, v)| (self.apply_value(k), self.apply_value(v))),
            ),
        }
    }

    fn apply_closure(&self, c: &Closure) -> Closure {
        let fns: Vec<Name> = names_of(&c.ext).into_iter().collect();
        let inner = self.without(fns.iter());
        let inner = inner.without_vars(&c.params);
        let ext_changes = self.apply_defs_needed(&c.ext, &fns);
        if inner.is_empty() && !ext_changes {
            return c.clone();
        }
        Closure {
            ext: if ext_changes {
                std::sync::Arc::new(self.apply_defs(&c.ext))
            } else {
                c.ext.clone()
            },
            params: c.params.clone(),
            body: std::sync::Arc::new(inner.apply_expr(&c.body)),
        }
    }

    fn apply_defs_needed(&self, ext: &[FunDef], fns: &[Name]) -> bool {
        let s = self.without(fns.iter());
        ext.iter().any(|d| !s.without_vars(&d.params).is_empty())
    }

    fn apply_defs(&self, ext: &[FunDef]) -> Vec<FunDef> {
        let fns: Vec<Name> = names_of(ext).into_iter().collect();
        let s = self.without(fns.iter());
        ext.iter()
            .map(|d| FunDef {
                id: d.id.clone(),
                params: d.params.clone(),
                body: s.without_vars(&d.params).apply_expr(&d.body),
            })
            .collect()
    }

    fn apply_clause(&self, cl: &Clause) -> Clause {
        let pvars: Vec<Var> = cl
            .patterns
            .iter()
            .flat_map(matching::vars)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let s = self.without_vars(&pvars);
        Clause {
            patterns: cl.patterns.clone(),
            guard: s.apply_expr(&cl.guard),
            body: s.apply_expr(&cl.body),
        }
    }

    fn apply_all(&self, es: &[Expr]) -> Vec<Expr> {
        es.iter().map(|e| self.apply_expr(e)).collect()
    }

    pub fn apply_expr(&self, e: &Expr) -> Expr {
        if self.is_empty() {
            return e.clone();
        }
        match e {
            Expr::Val(v) => Expr::Val(self.apply_value(v)),
            Expr::Fun { params, body } => Expr::Fun {
                params: params.clone(),
                body: Box::new(self.without_vars(params).apply_expr(body)),
            },
            Expr::Values(es) => Expr::Values(self.apply_all(es)),
            Expr::Cons(h, t) => Expr::cons(self.apply_expr(h), self.apply_expr(t)),
            Expr::Tuple(es) => Expr::Tuple(self.apply_all(es)),
            Expr::Map(pairs) => Expr::Map(
                pairs
                    .iter()
                    .map(|(k, v)| (self.apply_expr(k), self.apply_expr(v)))
                    .collect(),
            ),
            Expr::Call {
                module,
                function,
                args,
            } => Expr::Call {
                module: Box::new(self.apply_expr(module)),
                function: Box::new(self.apply_expr(function)),
                args: self.apply_all(args),
            },
            Expr::PrimOp { name, args } => Expr::PrimOp {
                name: name.clone(),
                args: self.apply_all(args),
            },
            Expr::Apply { fun, args } => Expr::Apply {
                fun: Box::new(self.apply_expr(fun)),
                args: self.apply_all(args),
            },
            Expr::Case { scrutinee, clauses } => Expr::Case {
                scrutinee: Box::new(self.apply_expr(scrutinee)),
                clauses: clauses.iter().map(|cl| self.apply_clause(cl)).collect(),
            },
            Expr::Let { vars, bind, body } => Expr::Let {
                vars: vars.clone(),
                bind: Box::new(self.apply_expr(bind)),
                body: Box::new(self.without_vars(vars).apply_expr(body)),
            },
            Expr::Seq(a, b) => Expr::seq(self.apply_expr(a), self.apply_expr(b)),
            Expr::LetRec { defs, body } => {
                let fns: Vec<Name> = names_of(defs).into_iter().collect();
                Expr::LetRec {
                    defs: self.apply_defs(defs),
                    body: Box::new(self.without(fns.iter()).apply_expr(body)),
                }
            }
            Expr::Try {
                expr,
                vars,
                body,
                catch_vars,
                handler,
            } => Expr::Try {
                expr: Box::new(self.apply_expr(expr)),
                vars: vars.clone(),
                body: Box::new(self.without_vars(vars).apply_expr(body)),
                catch_vars: catch_vars.clone(),
                handler: Box::new(self.without_vars(catch_vars).apply_expr(handler)),
            },
        }
    }
}

/// Syntax a substitution can be applied to.
pub trait Substitutable: Sized {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitutable for Expr {
    fn substitute(&self, s: &Substitution) -> Self {
        s.apply_expr(self)
    }
}

impl Substitutable for Value {
    fn substitute(&self, s: &Substitution) -> Self {
        s.apply_value(self)
    }
}

/// `r[σ]`
pub fn apply<T: Substitutable>(r: &T, s: &Substitution) -> T {
    r.substitute(s)
}
