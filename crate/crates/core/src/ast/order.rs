//! Total order on values, used for canonical map keys and the comparison BIFs.
//!
//! Int < Atom < Var < FunId < Closure < Nil < Cons < Tuple < Map. Inside a
//! constructor the order is lexicographic over the components.

use std::cmp::Ordering;

use super::{Closure, Value};

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Int(_) => 0,
            Value::Atom(_) => 1,
            Value::Var(_) => 2,
            Value::FunId(_) => 3,
            Value::Closure(_) => 4,
            Value::Nil => 5,
            Value::Cons(..) => 6,
            Value::Tuple(_) => 7,
            Value::Map(_) => 8,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Atom(a), Value::Atom(b)) => a.cmp(b),
            (Value::Var(a), Value::Var(b)) => a.cmp(b),
            (Value::FunId(a), Value::FunId(b)) => a.cmp(b),
            (Value::Closure(a), Value::Closure(b)) => a.cmp(b),
            (Value::Nil, Value::Nil) => Ordering::Equal,
            (Value::Cons(h1, t1), Value::Cons(h2, t2)) => h1.cmp(h2).then_with(|| t1.cmp(t2)),
            (Value::Tuple(a), Value::Tuple(b)) => a.cmp(b),
            (Value::Map(a), Value::Map(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Closures are ordered by arity first, then structurally. Two closures are
// equal only when they are syntactically identical.
impl Ord for Closure {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity()
            .cmp(&other.arity())
            .then_with(|| self.params.cmp(&other.params))
            .then_with(|| self.body.cmp(&other.body))
            .then_with(|| self.ext.cmp(&other.ext))
    }
}

impl PartialOrd for Closure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Expr, FunId, Var};

    #[test]
    fn constructor_ranks_follow_the_documented_order() {
        let ladder = [
            Value::int(100),
            Value::atom("a"),
            Value::var("X"),
            Value::FunId(FunId::new("f", 0)),
            Value::Closure(Closure::new(vec![], vec![], Expr::int(1))),
            Value::Nil,
            Value::cons(Value::int(1), Value::Nil),
            Value::tuple([]),
            Value::map([]),
        ];
        for w in ladder.windows(2) {
            assert!(w[0] < w[1], "{:?} < {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn leaves_compare_numerically_and_lexically() {
        assert!(Value::int(-5) < Value::int(3));
        assert!(Value::atom("abc") < Value::atom("abd"));
        assert!(Value::list([Value::int(1)]) < Value::list([Value::int(2)]));
        assert!(Value::tuple([Value::int(1)]) < Value::tuple([Value::int(1), Value::int(0)]));
    }

    #[test]
    fn closures_order_by_arity_first() {
        let unary = Value::Closure(Closure::new(vec![], vec![Var::new("X")], Expr::int(9)));
        let binary = Value::Closure(Closure::new(
            vec![],
            vec![Var::new("A"), Var::new("B")],
            Expr::int(0),
        ));
        assert!(unary < binary);
        assert_eq!(unary.cmp(&unary.clone()), Ordering::Equal);
    }
}
