//! Random expression trees shared by the notation properties and the
//! acceptance suite.

use foxwright::catalog::{pow, Expr};
use foxwright::series::{Entry, FWEntry, ParamExpr, Rational, SeriesSpec};
use proptest::prelude::*;

const NAMES: [&str; 6] = ["a", "b", "c", "l", "n", "m"];

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| Rational::new(p, q))
}

fn affine() -> impl Strategy<Value = ParamExpr> {
    (rational(), prop::collection::vec((0..NAMES.len(), rational()), 0..3)).prop_map(|(c, terms)| {
        terms
            .into_iter()
            .fold(ParamExpr::constant(c), |acc, (i, r)| acc.add(&ParamExpr::symbol(NAMES[i]).scale(r)))
    })
}

fn fw_entry() -> impl Strategy<Value = FWEntry> {
    (affine(), affine()).prop_map(|(o, c)| FWEntry::new(o, c))
}

fn entry(fox_wright: bool) -> impl Strategy<Value = Entry> {
    let single = if fox_wright { fw_entry().boxed() } else { affine().prop_map(FWEntry::plain).boxed() };
    let family = (
        single.clone(),
        prop::sample::select(vec!["i", "j"]),
        affine(),
        affine(),
    )
        .prop_map(|(entry, var, lower, upper)| Entry::Family {
            var: var.to_string(),
            lower,
            upper,
            entry,
        });
    prop_oneof![3 => single.prop_map(Entry::Single), 1 => family]
}

fn series() -> impl Strategy<Value = Expr> {
    any::<bool>().prop_flat_map(|fw| {
        (
            prop::collection::vec(entry(fw), 0..4),
            prop::collection::vec(entry(fw), 0..4),
            affine(),
        )
            .prop_map(move |(num, den, arg)| {
                Expr::Series(if fw {
                    SeriesSpec::fox_wright(num, den, arg)
                } else {
                    SeriesSpec::pfq(num, den, arg)
                })
            })
    })
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        rational().prop_map(Expr::Const),
        prop::sample::select(NAMES.to_vec()).prop_map(|s| Expr::Sym(s.to_string())),
        affine().prop_map(Expr::Gamma),
        (affine(), affine()).prop_map(|(x, n)| Expr::Poch(x, n)),
        affine().prop_map(Expr::NegOnePow),
        series(),
    ]
}

pub fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), affine()).prop_map(|(b, p)| pow(b, p)),
            (prop::sample::select(vec!["k", "j"]), affine(), inner.clone()).prop_map(|(v, u, body)| Expr::Sum {
                var: v.to_string(),
                upper: u,
                body: Box::new(body),
            }),
            inner.clone().prop_map(|x| Expr::Neg(Box::new(x))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(Box::new(x), Box::new(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(Box::new(x), Box::new(y))),
            (inner.clone(), inner).prop_map(|(x, y)| Expr::Div(Box::new(x), Box::new(y))),
        ]
    })
}
