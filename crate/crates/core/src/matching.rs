//! Clause selection: whether a pattern sequence matches a value sequence, and
//! the bindings a successful match produces.

use std::collections::BTreeSet;

use crate::ast::{Name, Pattern, Value, Var};
use crate::subst::Substitution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    NoMatch,
    Bindings(Substitution),
}

impl MatchOutcome {
    pub fn bindings(self) -> Option<Substitution> {
        match self {
            MatchOutcome::NoMatch => None,
            MatchOutcome::Bindings(s) => Some(s),
        }
    }
}

/// The variables of a pattern.
pub fn vars(p: &Pattern) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_vars(p, &mut out);
    out
}

fn collect_vars(p: &Pattern, out: &mut BTreeSet<Var>) {
    match p {
        Pattern::Int(_) | Pattern::Atom(_) | Pattern::Nil => {}
        Pattern::Var(x) => {
            out.insert(x.clone());
        }
        Pattern::Cons(h, t) => {
            collect_vars(h, out);
            collect_vars(t, out);
        }
        Pattern::Tuple(ps) => ps.iter().for_each(|p| collect_vars(p, out)),
        Pattern::Map(pairs) => pairs.iter().for_each(|(k, v)| {
            collect_vars(k, out);
            collect_vars(v, out);
        }),
    }
}

/// The variables of a whole pattern sequence.
pub fn vars_of_all(ps: &[Pattern]) -> BTreeSet<Var> {
    ps.iter().flat_map(vars).collect()
}

/// Decides matching without building bindings. Repeated variables are
/// checked by comparing every occurrence against the first one.
pub fn is_match(ps: &[Pattern], vs: &[Value]) -> bool {
    if ps.len() != vs.len() {
        return false;
    }
    let mut seen: Vec<(&Var, &Value)> = Vec::new();
    ps.iter().zip(vs).all(|(p, v)| fits(p, v, &mut seen))
}

fn fits<'a>(p: &'a Pattern, v: &'a Value, seen: &mut Vec<(&'a Var, &'a Value)>) -> bool {
    match (p, v) {
        (Pattern::Var(x), _) => match seen.iter().find(|(y, _)| *y == x) {
            Some((_, first)) => *first == v,
            None => {
                seen.push((x, v));
                true
            }
        },
        (Pattern::Int(a), Value::Int(b)) => a == b,
        (Pattern::Atom(a), Value::Atom(b)) => a == b,
        (Pattern::Nil, Value::Nil) => true,
        (Pattern::Cons(ph, pt), Value::Cons(vh, vt)) => fits(ph, vh, seen) && fits(pt, vt, seen),
        (Pattern::Tuple(ps), Value::Tuple(vs)) => {
            ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| fits(p, v, seen))
        }
        (Pattern::Map(pairs), Value::Map(entries)) => pairs.iter().all(|(pk, pv)| {
            let Some(key) = pk.to_value() else {
                return false;
            };
            match entries.binary_search_by(|(k, _)| k.cmp(&key)) {
                Ok(i) => fits(pv, &entries[i].1, seen),
                Err(_) => false,
            }
        }),
        _ => false,
    }
}

/// Matches `ps` against `vs`, producing one binding per pattern variable.
pub fn match_patterns(ps: &[Pattern], vs: &[Value]) -> MatchOutcome {
    if ps.len() != vs.len() {
        return MatchOutcome::NoMatch;
    }
    let mut s = Substitution::new();
    for (p, v) in ps.iter().zip(vs) {
        if !bind(p, v, &mut s) {
            return MatchOutcome::NoMatch;
        }
    }
    MatchOutcome::Bindings(s)
}

fn bind(p: &Pattern, v: &Value, s: &mut Substitution) -> bool {
    match p {
        Pattern::Var(x) => {
            let name = Name::Var(x.clone());
            match s.get(&name) {
                Some(prev) => prev == v,
                None => {
                    s.insert_trusted(name, v.clone());
                    true
                }
            }
        }
        Pattern::Int(_) | Pattern::Atom(_) | Pattern::Nil => p.to_value().as_ref() == Some(v),
        Pattern::Cons(ph, pt) => match v {
            Value::Cons(vh, vt) => bind(ph, vh, s) && bind(pt, vt, s),
            _ => false,
        },
        Pattern::Tuple(ps) => match v {
            Value::Tuple(vs) if vs.len() == ps.len() => {
                ps.iter().zip(vs).all(|(p, v)| bind(p, v, s))
            }
            _ => false,
        },
        Pattern::Map(pairs) => match v {
            Value::Map(entries) => pairs.iter().all(|(pk, pv)| {
                pk.to_value()
                    .and_then(|key| entries.iter().find(|(k, _)| *k == key))
                    .is_some_and(|(_, found)| bind(pv, found, s))
            }),
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings(pairs: &[(&str, Value)]) -> MatchOutcome {
        MatchOutcome::Bindings(
            Substitution::from_pairs(
                pairs
                    .iter()
                    .map(|(x, v)| (Name::Var(Var::new(x)), v.clone())),
            )
            .unwrap(),
        )
    }

    #[test]
    fn variables_match_anything() {
        assert!(is_match(&[Pattern::var("X")], &[Value::int(5)]));
        assert_eq!(
            match_patterns(&[Pattern::var("X")], &[Value::int(5)]),
            bindings(&[("X", Value::int(5))])
        );
    }

    #[test]
    fn distinct_literals_do_not_match() {
        assert!(!is_match(&[Pattern::int(0)], &[Value::int(1)]));
        assert_eq!(
            match_patterns(&[Pattern::int(0)], &[Value::int(1)]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn tuples_match_structurally() {
        let p = Pattern::Tuple(vec![Pattern::var("X"), Pattern::int(2)]);
        assert!(is_match(
            &[p],
            &[Value::tuple([Value::int(1), Value::int(2)])]
        ));
    }

    #[test]
    fn cons_binds_head_and_tail() {
        let p = Pattern::cons(Pattern::var("H"), Pattern::var("T"));
        assert_eq!(
            match_patterns(&[p], &[Value::list([Value::int(1)])]),
            bindings(&[("H", Value::int(1)), ("T", Value::Nil)])
        );
    }

    #[test]
    fn length_mismatch_is_no_match() {
        assert!(!is_match(&[], &[Value::int(1)]));
        assert_eq!(
            match_patterns(&[Pattern::var("X")], &[]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn repeated_variables_must_agree() {
        let ps = [Pattern::var("X"), Pattern::var("X")];
        assert!(is_match(&ps, &[Value::int(1), Value::int(1)]));
        assert!(!is_match(&ps, &[Value::int(1), Value::int(2)]));
        assert_eq!(
            match_patterns(&ps, &[Value::int(1), Value::int(1)]),
            bindings(&[("X", Value::int(1))])
        );
        assert_eq!(
            match_patterns(&ps, &[Value::int(1), Value::int(2)]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn map_patterns_match_partially_on_ground_keys() {
        let m = Value::map([
            (Value::int(1), Value::atom("a")),
            (Value::int(2), Value::atom("b")),
        ]);
        let p = Pattern::Map(vec![(Pattern::int(2), Pattern::var("V"))]);
        assert_eq!(
            match_patterns(std::slice::from_ref(&p), std::slice::from_ref(&m)),
            bindings(&[("V", Value::atom("b"))])
        );
        let missing = Pattern::Map(vec![(Pattern::int(3), Pattern::var("V"))]);
        assert!(!is_match(&[missing], std::slice::from_ref(&m)));
        let open_key = Pattern::Map(vec![(Pattern::var("K"), Pattern::var("V"))]);
        assert!(!is_match(&[open_key], &[m]));
    }

    #[test]
    fn vars_collects_every_variable() {
        let p = Pattern::Tuple(vec![
            Pattern::var("A"),
            Pattern::cons(Pattern::var("B"), Pattern::var("A")),
        ]);
        let got: Vec<_> = vars(&p)
            .into_iter()
            .map(|v| v.as_str().to_owned())
            .collect();
        assert_eq!(got, ["A", "B"]);
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::gen::Gen;
    use crate::subst::apply;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn instances_match_with_the_instantiating_bindings(seed in any::<u64>()) {
            let mut gen = Gen::new(seed);
            let p = gen.pattern(3);
            let mut sigma = Substitution::new();
            for x in vars(&p) {
                sigma.bind(x.into(), gen.value(2)).unwrap();
            }
            let v = apply(&p.to_open_value(), &sigma);
            prop_assert!(is_match(std::slice::from_ref(&p), std::slice::from_ref(&v)));
            let found = match_patterns(&[p], &[v]).bindings();
            prop_assert_eq!(found, Some(sigma));
        }

        #[test]
        fn is_match_agrees_with_match(seed in any::<u64>()) {
            let mut gen = Gen::new(seed);
            let p = gen.pattern(2);
            let v = gen.value(2);
            let outcome = match_patterns(std::slice::from_ref(&p), std::slice::from_ref(&v));
            prop_assert_eq!(is_match(std::slice::from_ref(&p), &[v]), outcome.clone().bindings().is_some());
            if let Some(s) = outcome.bindings() {
                let domain: BTreeSet<Var> = s.iter().filter_map(|(n, _)| match n {
                    crate::ast::Name::Var(x) => Some(x.clone()),
                    _ => None,
                }).collect();
                prop_assert_eq!(domain, vars(&p));
            }
        }
    }
}
