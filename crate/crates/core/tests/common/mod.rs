//! Random grammar expressions for property tests.
#![allow(dead_code)]

use cbset::{Direction, Rat, SetExpr};
use proptest::prelude::*;

pub fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

pub fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

/// Ratios whose prime supports are either equal or disjoint.
pub fn ratio() -> impl Strategy<Value = Rat> {
    prop_oneof![
        Just(Rat::new(1, 2)),
        Just(Rat::new(-1, 2)),
        Just(Rat::new(1, 4)),
        Just(Rat::new(1, 3)),
        Just(Rat::new(-1, 3)),
        Just(Rat::new(1, 5)),
    ]
}

pub fn fin() -> impl Strategy<Value = SetExpr> {
    prop::collection::vec(small_rat(), 1..4).prop_map(|ps| SetExpr::fin(ps).unwrap())
}

pub fn geom() -> impl Strategy<Value = SetExpr> {
    (small_rat(), nonzero_rat(), ratio(), any::<bool>())
        .prop_map(|(c, s, q, w)| SetExpr::geom(c, s, q, w).unwrap())
}

pub fn tail() -> impl Strategy<Value = SetExpr> {
    (
        small_rat(),
        prop_oneof![
            Just(Rat::new(1, 2)),
            Just(Rat::one()),
            Just(Rat::int(2)),
            Just(Rat::int(3))
        ],
        any::<bool>(),
    )
        .prop_map(|(a, d, up)| {
            SetExpr::tail(a, d, if up { Direction::Up } else { Direction::Down }).unwrap()
        })
}

/// Bounded expressions (not necessarily closed).
pub fn bounded() -> impl Strategy<Value = SetExpr> {
    let leaf = prop_oneof![fin(), geom()];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            (inner.clone(), nonzero_rat(), small_rat())
                .prop_map(|(c, a, b)| SetExpr::affine(c, a, b).unwrap()),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|cs| SetExpr::union(cs).unwrap()),
            prop::collection::vec(inner, 2..3).prop_map(|cs| SetExpr::msum(cs).unwrap()),
        ]
    })
}

/// Any grammar expression: bounded ones, tails, unions with tails, sums
/// with one tail, and isolated-point residuals.
pub fn any_expr() -> impl Strategy<Value = SetExpr> {
    prop_oneof![
        4 => bounded(),
        1 => tail(),
        1 => (bounded(), tail()).prop_map(|(b, t)| SetExpr::union(vec![b, t]).unwrap()),
        1 => (bounded(), tail()).prop_map(|(b, t)| SetExpr::msum(vec![b, t]).unwrap()),
        1 => bounded().prop_map(SetExpr::iso),
    ]
}
