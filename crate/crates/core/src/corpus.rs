//! Bundled example programs.

use crate::ast::Expr;
use crate::frontend::{parse, SourceUnit};

/// `f(L) when length(L) == 0 -> 1; f(_) -> 2.` after translation.
pub const GUARD: &str = include_str!("../corpus/guard.core");
/// `f([]) -> 1; f(_) -> 2.` after translation.
pub const PATTERN: &str = include_str!("../corpus/pattern.core");
/// [`PATTERN`] with the two result literals swapped.
pub const PATTERN_MUTATED: &str = include_str!("../corpus/pattern_mutated.core");
pub const SUM: &str = include_str!("../corpus/sum.core");
pub const LOOP: &str = include_str!("../corpus/loop.core");

/// The bundled sources by file name.
pub const ALL: [(&str, &str); 5] = [
    ("guard.core", GUARD),
    ("pattern.core", PATTERN),
    ("pattern_mutated.core", PATTERN_MUTATED),
    ("sum.core", SUM),
    ("loop.core", LOOP),
];

pub fn unit(src: &str) -> SourceUnit {
    parse(src).expect("bundled programs parse")
}

/// The body of the last definition in `src`, open in that definition's
/// parameters.
pub fn entry_body(src: &str) -> Expr {
    match unit(src) {
        SourceUnit::Module(defs) => defs.last().expect("nonempty module").def.body.clone(),
        SourceUnit::Expr(e) => e,
    }
}
