use std::collections::BTreeSet;

use cerl::ast::{Expr, Name, Var};
use cerl::corpus;
use cerl::equiv::{ciu_equiv, ciu_le, value_rel, EquivConfig, Verdict, VerdictReport};
use cerl::frontend::{parse_expr, parse_value};
use cerl::gen::Gen;
use cerl::machine::{Frame, Redex};
use proptest::prelude::*;

fn redex(src: &str) -> Redex {
    Redex::Expr(parse_expr(src).unwrap())
}

fn small() -> EquivConfig {
    EquivConfig {
        fuel: 10_000,
        num_stacks: 10,
        num_substitutions: 20,
        ..EquivConfig::default()
    }
}

fn none() -> BTreeSet<Name> {
    BTreeSet::new()
}

#[test]
fn one_is_not_two_and_the_witness_inspects_the_result() {
    let v = ciu_equiv(&redex("1"), &redex("2"), &none(), &EquivConfig::default()).unwrap();
    let w = v.witness().unwrap();
    assert!(v.is_inequivalent());
    assert!(w.reproduces());
    assert!(matches!(w.stack.top(), Some(Frame::CaseScrutinee(_))));
    assert!(w.left_outcome.terminated());
    assert!(!w.right_outcome.terminated());
}

#[test]
fn reflexive_on_a_constant() {
    let v = ciu_le(&redex("1"), &redex("1"), &none(), &small()).unwrap();
    assert!(v.is_equivalent());
}

#[test]
fn refactoring_pair() {
    let gamma: BTreeSet<Name> = [Name::Var(Var::new("_0"))].into();
    let guard = Redex::Expr(corpus::entry_body(corpus::GUARD));
    let pattern = Redex::Expr(corpus::entry_body(corpus::PATTERN));
    let mutated = Redex::Expr(corpus::entry_body(corpus::PATTERN_MUTATED));
    let cfg = EquivConfig::default();
    assert!(ciu_equiv(&guard, &pattern, &gamma, &cfg)
        .unwrap()
        .is_equivalent());
    let bad = ciu_equiv(&guard, &mutated, &gamma, &cfg).unwrap();
    assert!(bad.is_inequivalent());
    assert!(bad.witness().unwrap().reproduces());
}

#[test]
fn a_preorder_is_not_symmetric() {
    // The stuck redex never terminates, so it is below everything.
    let stuck = Redex::Expr(cerl::equiv::stuck_expr());
    assert!(ciu_le(&stuck, &redex("1"), &none(), &small())
        .unwrap()
        .is_equivalent());
    assert!(ciu_le(&redex("1"), &stuck, &none(), &small())
        .unwrap()
        .is_inequivalent());
}

#[test]
fn reports_carry_the_seed_and_witness() {
    let cfg = small();
    let v = ciu_equiv(&redex("'a'"), &redex("'b'"), &none(), &cfg).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&VerdictReport::new(&v, &cfg).to_json()).unwrap();
    assert_eq!(json["verdict"], "inequivalent");
    assert_eq!(json["seed"], cfg.seed);
    assert_eq!(json["fuel"], cfg.fuel);
    assert!(json["witness"]["stack"].as_str().unwrap().contains("case"));
}

#[test]
fn value_relation_examples() {
    let cfg = EquivConfig::default();
    let rel =
        |a: &str, b: &str| value_rel(&parse_value(a).unwrap(), &parse_value(b).unwrap(), 3, &cfg);
    assert!(rel("5", "5"));
    assert!(!rel("[]", "{}"));
    assert!(rel("clos([], [X], X)", "clos([], [X], do 'a' X)"));
}

fn variants(e: &Expr) -> [Expr; 3] {
    let x = Var::new("_T");
    [
        e.clone(),
        Expr::seq(Expr::atom("x"), e.clone()),
        Expr::let_(
            vec![x.clone()],
            e.clone(),
            Expr::Val(cerl::ast::Value::Var(x)),
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witnesses_replay(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let (a, b) = (Redex::Expr(gen.closed_expr(2)), Redex::Expr(gen.closed_expr(2)));
        let v = ciu_equiv(&a, &b, &none(), &small()).unwrap();
        if let Some(w) = v.witness() {
            prop_assert!(w.reproduces());
        }
    }

    #[test]
    fn generated_redexes_are_equivalent_to_themselves(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let r = Redex::Expr(gen.closed_expr(3));
        let v = ciu_equiv(&r, &r, &none(), &small()).unwrap();
        prop_assert!(v.is_equivalent(), "{:?}", v);
    }

    #[test]
    fn transitivity_on_shared_suites(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let [a, b, c] = variants(&gen.closed_expr(2)).map(Redex::Expr);
        let cfg = small();
        let le = |x: &Redex, y: &Redex| ciu_le(x, y, &none(), &cfg).unwrap();
        if le(&a, &b).is_equivalent() && le(&b, &c).is_equivalent() {
            let v = le(&a, &c);
            prop_assert!(v.is_equivalent(), "{:?}", v);
        }
    }

    #[test]
    fn merged_verdicts_count_both_directions(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let (a, b) = (Redex::Expr(gen.closed_expr(2)), Redex::Expr(gen.closed_expr(2)));
        let cfg = small();
        let both = ciu_equiv(&a, &b, &none(), &cfg).unwrap();
        let forward = ciu_le(&a, &b, &none(), &cfg).unwrap();
        let backward = ciu_le(&b, &a, &none(), &cfg).unwrap();
        prop_assert_eq!(both.tests_run(), forward.tests_run() + backward.tests_run());
        let kind = |v: &Verdict| (v.is_inequivalent(), v.is_unknown());
        let expected = if forward.is_inequivalent() || backward.is_inequivalent() {
            (true, false)
        } else if forward.is_unknown() || backward.is_unknown() {
            (false, true)
        } else {
            (false, false)
        };
        prop_assert_eq!(kind(&both), expected);
    }
}
