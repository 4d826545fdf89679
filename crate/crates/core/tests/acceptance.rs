//! One line per acceptance criterion, with the measured figures. Exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cerl::ast::{EvalResult, Exception, Name, Value, Var};
use cerl::corpus;
use cerl::equiv::{ciu_equiv, EquivConfig, Verdict};
use cerl::frontend::parse_expr;
use cerl::machine::Redex;
use cerl::props::{self, sizes};

struct Outcome {
    ok: bool,
    detail: String,
}

fn criterion(
    id: u32,
    title: &str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Outcome,
) -> bool {
    let start = Instant::now();
    let Outcome { ok, detail } = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = ok && in_time;
    let budget = limit
        .map(|l| format!(" (limit {:.0?})", l))
        .unwrap_or_default();
    println!(
        "{} {id}. {title}: {detail}; {:.2?}{budget}",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    pass
}

fn report_outcome(r: &props::CheckReport, minimum: usize) -> Outcome {
    Outcome {
        ok: r.passed() && r.checked >= minimum,
        detail: format!(
            "{} checked, {} failed, {} unknown{}",
            r.checked,
            r.failed,
            r.unknown,
            r.examples
                .first()
                .map(|e| format!(", e.g. {e}"))
                .unwrap_or_default()
        ),
    }
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Equivalent { .. } => "equivalent",
        Verdict::Inequivalent { .. } => "inequivalent",
        Verdict::Unknown { .. } => "unknown",
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let cfg = EquivConfig::default();
    let mut all = true;

    all &= criterion(1, "worked example traces", Some(secs(1)), || {
        let (empty, rules) = props::golden_run(Value::Nil);
        let (zero, zero_rules) = props::golden_run(Value::int(0));
        let one = EvalResult::Values(vec![Value::int(1)]);
        let two = EvalResult::Values(vec![Value::int(2)]);
        let path = props::is_subsequence(&props::GOLDEN_RULES, &rules);
        let exc_path = props::is_subsequence(&props::GOLDEN_EXCEPTION_RULES, &zero_rules);
        Outcome {
            ok: empty.result() == Some(&one) && zero.result() == Some(&two) && path && exc_path,
            detail: format!(
                "f([]) = {:?}, f(0) = {:?}, rule path found: {path}, exception path found: {exc_path}",
                empty.result(),
                zero.result()
            ),
        }
    });

    all &= criterion(2, "determinism", Some(secs(30)), || {
        report_outcome(
            &props::determinism(sizes::DETERMINISM, sizes::SEED),
            sizes::DETERMINISM,
        )
    });

    all &= criterion(3, "extend frame stack", Some(secs(60)), || {
        report_outcome(
            &props::extend_frame_stack(sizes::EXTEND, sizes::SEED, sizes::FUEL),
            sizes::EXTEND,
        )
    });

    all &= criterion(4, "remove and add frame", Some(secs(120)), || {
        let r = props::remove_add_frame(sizes::REMOVE_ADD, sizes::SEED, sizes::FUEL);
        let mut out = report_outcome(&r, 500);
        out.ok &= r.unknown_rate() < 0.05;
        out.detail += &format!(", unknown rate {:.2}%", 100.0 * r.unknown_rate());
        out
    });

    all &= criterion(5, "ciu harness soundness", Some(secs(120)), || {
        let one = Redex::Expr(parse_expr("1").unwrap());
        let two = Redex::Expr(parse_expr("2").unwrap());
        let v = ciu_equiv(&one, &two, &BTreeSet::new(), &cfg).unwrap();
        let replays = v.witness().is_some_and(|w| w.reproduces());
        let refl = props::reflexivity(sizes::REFLEXIVITY, sizes::SEED, &cfg);
        let mut out = report_outcome(&refl, sizes::REFLEXIVITY);
        out.ok &= v.is_inequivalent() && replays;
        out.detail = format!(
            "<1> vs <2> {} with replayable witness {replays}; reflexivity {}",
            verdict_name(&v),
            out.detail
        );
        out
    });

    all &= criterion(6, "refactoring correctness", Some(secs(120)), || {
        let gamma: BTreeSet<Name> = [Name::Var(Var::new("_0"))].into();
        let guard = Redex::Expr(corpus::entry_body(corpus::GUARD));
        let pattern = Redex::Expr(corpus::entry_body(corpus::PATTERN));
        let mutated = Redex::Expr(corpus::entry_body(corpus::PATTERN_MUTATED));
        let good = ciu_equiv(&guard, &pattern, &gamma, &cfg).unwrap();
        let bad = ciu_equiv(&guard, &mutated, &gamma, &cfg).unwrap();
        Outcome {
            ok: good.is_equivalent()
                && bad.is_inequivalent()
                && cfg.num_substitutions >= 100
                && cfg.num_stacks >= 50,
            detail: format!(
                "guard vs pattern {} over {} trials, guard vs mutated {}",
                verdict_name(&good),
                good.tests_run(),
                verdict_name(&bad)
            ),
        }
    });

    all &= criterion(7, "equivalent values are equal", Some(secs(10)), || {
        let r = props::values_theorem(sizes::VALUES, &cfg);
        Outcome {
            ok: r.holds() && r.accepted >= 1000 && r.rejected >= 1000,
            detail: format!(
                "{} accepted, {} rejected, {} mismatches",
                r.accepted,
                r.rejected,
                r.mismatches.len()
            ),
        }
    });

    all &= criterion(8, "case without a match", None, || {
        let e = parse_expr("case 1 of <2> when 'true' -> 'a' end").unwrap();
        let got = cerl::machine::eval_star(cerl::machine::Configuration::initial(e), 100);
        let expected = EvalResult::Exc(Exception::if_clause());
        let r = props::exc_case();
        Outcome {
            ok: got.result() == Some(&expected) && r.passed(),
            detail: format!("got {:?}", got.result()),
        }
    });

    all &= criterion(9, "print and parse round trip", Some(secs(10)), || {
        report_outcome(
            &props::round_trip(sizes::ROUND_TRIP, sizes::SEED),
            sizes::ROUND_TRIP,
        )
    });

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
