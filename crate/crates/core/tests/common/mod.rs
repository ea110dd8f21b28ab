//! Random syntax trees for the sequence text format.

use proptest::prelude::*;
use sporadic_core::seqdsl::{Expr, SequenceDef};
use sporadic_core::Integer;

pub fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|v| Expr::Int(Integer::from(v))),
        Just(Expr::N),
        Just(Expr::Index),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let pair = (inner.clone(), inner.clone());
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Fact(Box::new(e))),
            pair.clone().prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            pair.clone().prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            pair.clone().prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            pair.clone().prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            pair.clone().prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
            pair.prop_map(|(a, b)| Expr::Binom(Box::new(a), Box::new(b))),
        ]
    })
}

/// Bounds may only mention `n`.
pub fn bound() -> impl Strategy<Value = Expr> {
    expr().prop_filter("bounds cannot use the index", |e| !mentions_index(e))
}

fn mentions_index(e: &Expr) -> bool {
    match e {
        Expr::Index => true,
        Expr::Int(_) | Expr::N => false,
        Expr::Neg(a) | Expr::Fact(a) => mentions_index(a),
        Expr::Add(a, b)
        | Expr::Sub(a, b)
        | Expr::Mul(a, b)
        | Expr::Div(a, b)
        | Expr::Pow(a, b)
        | Expr::Binom(a, b) => mentions_index(a) || mentions_index(b),
    }
}

pub fn definition() -> impl Strategy<Value = SequenceDef> {
    (
        "[a-z][a-z0-9_]{0,6}",
        prop_oneof![Just("k"), Just("j"), Just("idx"), Just("i_2")],
        bound(),
        bound(),
        expr(),
    )
        .prop_filter("names must not be reserved", |(name, ..)| {
            !["seq", "sum", "binom", "fact"].contains(&name.as_str())
        })
        .prop_map(|(name, index, lower, upper, body)| SequenceDef {
            name,
            index: index.to_owned(),
            lower,
            upper,
            body,
        })
}
