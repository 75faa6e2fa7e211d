//! Hand-coded identity records.
//!
//! λ is spelled `l`. Integer symbols are `m` and `n`; `i` is reserved for
//! summation and family indices.

use std::collections::BTreeMap;

use super::{gamma_of, int, neg_one_pow, poch, pow, series, sum, sym, Constraint, Domain, Expr, Identity, Pin};
use crate::series::{Entry, FWEntry, ParamExpr, SeriesSpec};

fn p(s: &str) -> ParamExpr {
    s.parse()
        .unwrap_or_else(|e| panic!("bad parameter `{s}`: {e}"))
}

/// Affine expression as an arithmetic tree, positive part first.
pub fn lin(s: &str) -> Expr {
    affine_expr(&p(s))
}

pub fn affine_expr(q: &ParamExpr) -> Expr {
    use num_traits::{One, Signed, Zero};
    let mut items: Vec<(Option<String>, crate::series::Rational)> = Vec::new();
    if !q.constant_part().is_zero() {
        items.push((None, q.constant_part()));
    }
    items.extend(q.terms().map(|(k, c)| (Some(k.to_string()), c)));
    if items.is_empty() {
        return int(0);
    }
    if let Some(pos) = items.iter().position(|(_, c)| c.is_positive()) {
        let first = items.remove(pos);
        items.insert(0, first);
    }
    let magnitude = |name: &Option<String>, c: crate::series::Rational| match name {
        None => Expr::Const(c.abs()),
        Some(s) if c.abs().is_one() => sym(s),
        Some(s) => Expr::Const(c.abs()) * sym(s),
    };
    let mut it = items.into_iter();
    let (n0, c0) = it.next().unwrap();
    let mut acc = if c0.is_positive() {
        magnitude(&n0, c0)
    } else if n0.is_none() {
        Expr::Const(c0)
    } else {
        -magnitude(&n0, c0)
    };
    for (name, c) in it {
        acc = if c.is_positive() {
            acc + magnitude(&name, c)
        } else {
            acc - magnitude(&name, c)
        };
    }
    acc
}

fn prod(factors: Vec<Expr>) -> Expr {
    factors
        .into_iter()
        .reduce(|a, b| a * b)
        .unwrap_or_else(|| int(1))
}

fn quot(num: Vec<Expr>, den: Vec<Expr>) -> Expr {
    prod(num) / prod(den)
}

fn g(s: &str) -> Expr {
    gamma_of(p(s))
}

fn po(x: &str, n: &str) -> Expr {
    poch(p(x), p(n))
}

fn s(name: &str) -> Expr {
    sym(name)
}

/// pFq with plain parameters.
fn hyp(num: &[&str], den: &[&str], z: &str) -> Expr {
    let plain = |xs: &[&str]| xs.iter().map(|x| Entry::Single(FWEntry::plain(p(x)))).collect();
    series(SeriesSpec::pfq(plain(num), plain(den), p(z)))
}

fn hyp_entries(num: Vec<Entry>, den: Vec<Entry>, z: &str) -> Expr {
    series(SeriesSpec::pfq(num, den, p(z)))
}

fn one(x: &str) -> Vec<Entry> {
    vec![Entry::Single(FWEntry::plain(p(x)))]
}

fn many(xs: &[&str]) -> Vec<Entry> {
    xs.iter().flat_map(|x| one(x)).collect()
}

fn family(body: &str, lo: &str, hi: &str) -> Vec<Entry> {
    vec![Entry::Family {
        var: "i".into(),
        lower: p(lo),
        upper: p(hi),
        entry: FWEntry::plain(p(body)),
    }]
}

/// Fox-Wright group `(x1, ..., xr; coeff)`.
fn grp(offsets: &[&str], coeff: &str) -> Vec<Entry> {
    offsets
        .iter()
        .map(|o| Entry::Single(FWEntry::new(p(o), p(coeff))))
        .collect()
}

fn psi(num: Vec<Vec<Entry>>, den: Vec<Vec<Entry>>, z: &str) -> Expr {
    series(SeriesSpec::fox_wright(
        num.into_iter().flatten().collect(),
        den.into_iter().flatten().collect(),
        p(z),
    ))
}

struct Spec<'a> {
    name: &'a str,
    provenance: &'a str,
    complex: &'a [&'a str],
    integer: &'a [&'a str],
    pins: &'a [(&'a str, &'a str)],
    constraints: Vec<Constraint>,
    lhs: Expr,
    rhs: Expr,
}

fn build(spec: Spec) -> Identity {
    let mut symbols = BTreeMap::new();
    for c in spec.complex {
        symbols.insert(c.to_string(), Domain::Complex);
    }
    for n in spec.integer {
        symbols.insert(n.to_string(), Domain::NonnegInt);
    }
    Identity {
        name: spec.name.to_string(),
        provenance: spec.provenance.to_string(),
        symbols,
        pins: spec
            .pins
            .iter()
            .map(|(sym, v)| Pin {
                symbol: sym.to_string(),
                value: p(v),
            })
            .collect(),
        constraints: spec.constraints,
        lhs: spec.lhs,
        rhs: spec.rhs,
    }
}

fn nonzero(e: Expr) -> Constraint {
    Constraint::NonZero(e)
}

fn re_pos(x: &str) -> Constraint {
    Constraint::RePositive(p(x))
}

fn at_most(symbol: &str, bound: i64) -> Constraint {
    Constraint::AtMost {
        symbol: symbol.to_string(),
        bound,
    }
}

/// `λ − a + λn`
fn lam_den() -> Expr {
    s("l") - s("a") + s("l") * s("n")
}

/// `1 + 2a + 2λn + 2n`
fn thm1_den() -> Expr {
    int(1) + int(2) * s("a") + int(2) * s("l") * s("n") + int(2) * s("n")
}

/// `(a + λ + 2λn + n)(a − λ − 2λn + n)`
fn reciprocal_den() -> Expr {
    let plus = s("a") + s("l") + int(2) * s("l") * s("n") + s("n");
    let minus = s("a") - s("l") - int(2) * s("l") * s("n") + s("n");
    plus * minus
}

fn classical() -> Vec<Identity> {
    let dougall_rhs = quot(
        vec![g("1+a-b"), g("1+a-c"), g("1+a-d"), g("1+a-b-c-d")],
        vec![g("1+a"), g("1+a-b-c"), g("1+a-b-d"), g("1+a-c-d")],
    );
    vec![
        build(Spec {
            name: "whipple",
            provenance: "Whipple 3F2 summation",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[("a", "-n")],
            constraints: vec![re_pos("b")],
            lhs: hyp(&["a", "1-a", "b"], &["c", "1+2*b-c"], "1"),
            rhs: quot(
                vec![g("c/2"), g("(1+c)/2"), g("b+(1-c)/2"), g("b+(2-c)/2")],
                vec![g("(a+c)/2"), g("(1-a+c)/2"), g("b+(1+a-c)/2"), g("b+(2-a-c)/2")],
            ),
        }),
        build(Spec {
            name: "whipple-terminating",
            provenance: "Whipple 3F2 summation, case a = -n",
            complex: &["b", "c"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: hyp(&["-n", "1+n", "b"], &["c", "1+2*b-c"], "1"),
            rhs: quot(
                vec![po("(c-n)/2", "n"), po("c-2*b", "n")],
                vec![po("(c-n)/2-b", "n"), po("c", "n")],
            ),
        }),
        build(Spec {
            name: "dougall",
            provenance: "Dougall 5F4 summation",
            complex: &["a", "b", "c", "d"],
            integer: &["n"],
            pins: &[("d", "-n")],
            constraints: vec![re_pos("1+a-b-c-d")],
            lhs: hyp(&["a", "1+a/2", "b", "c", "d"], &["a/2", "1+a-b", "1+a-c", "1+a-d"], "1"),
            rhs: dougall_rhs,
        }),
        build(Spec {
            name: "dougall-terminating",
            provenance: "Dougall 5F4 summation, case d = -n",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: hyp(&["a", "1+a/2", "b", "c", "-n"], &["a/2", "1+a-b", "1+a-c", "1+a+n"], "1"),
            rhs: quot(
                vec![po("1+a", "n"), po("1+a-b-c", "n")],
                vec![po("1+a-b", "n"), po("1+a-c", "n")],
            ),
        }),
        build(Spec {
            name: "dougall-4f3-limit",
            provenance: "Dougall 5F4 summation, limit d to infinity",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[("c", "-n")],
            constraints: vec![re_pos("1+a/2-b-c")],
            lhs: hyp(&["a", "1+a/2", "b", "c"], &["a/2", "1+a-b", "1+a-c"], "-1"),
            rhs: quot(vec![g("1+a-b"), g("1+a-c")], vec![g("1+a"), g("1+a-b-c")]),
        }),
        build(Spec {
            name: "dixon",
            provenance: "Dixon 3F2 summation",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[("c", "-n")],
            constraints: vec![re_pos("1+a/2-b-c")],
            lhs: hyp(&["a", "b", "c"], &["1+a-b", "1+a-c"], "1"),
            rhs: quot(
                vec![g("1+a/2"), g("1+a-b"), g("1+a-c"), g("1+a/2-b-c")],
                vec![g("1+a"), g("1+a/2-b"), g("1+a/2-c"), g("1+a-b-c")],
            ),
        }),
        build(Spec {
            name: "sixf5-transform",
            provenance: "6F5 to 3F2 transformation",
            complex: &["a", "b", "c", "d", "e"],
            integer: &["n"],
            pins: &[("b", "-n")],
            constraints: vec![],
            lhs: hyp(
                &["a", "1+a/2", "b", "c", "d", "e"],
                &["a/2", "1+a-b", "1+a-c", "1+a-d", "1+a-e"],
                "-1",
            ),
            rhs: quot(vec![g("1+a-b"), g("1+a-c")], vec![g("1+a"), g("1+a-b-c")])
                * hyp(&["1+a-d-e", "b", "c"], &["1+a-d", "1+a-e"], "1"),
        }),
        build(Spec {
            name: "sixf5-evaluation",
            provenance: "6F5 evaluation from the transformation and Dixon summation",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[("c", "-n")],
            constraints: vec![re_pos("a")],
            lhs: hyp(
                &["a", "1+a/2", "b", "1-b", "c", "1-c"],
                &["a/2", "1+a-b", "a+b", "1+a-c", "a+c"],
                "-1",
            ),
            rhs: quot(
                vec![g("1/2"), g("1/2"), g("a+b"), g("1+a-b"), g("a+c"), g("1+a-c")],
                vec![
                    pow(int(2), p("2*a-1")),
                    g("a"),
                    g("1+a"),
                    g("(a+b+c)/2"),
                    g("(1+a+b-c)/2"),
                    g("(1+a-b+c)/2"),
                    g("(2+a-b-c)/2"),
                ],
            ),
        }),
        build(Spec {
            name: "chu-shift-denominator",
            provenance: "Chu shifted-denominator 3F2 expansion, case a = -n",
            complex: &["b", "c"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![at_most("m", 4)],
            lhs: hyp(&["-n", "1+n", "b"], &["c", "1+2*b-c+m"], "1"),
            rhs: quot(vec![po("1+2*b-c", "m")], vec![po("2+2*b-2*c", "m")])
                * sum(
                    "i",
                    p("m"),
                    neg_one_pow(p("i"))
                        * quot(vec![po("-m", "i"), po("3/2+b-c", "i")], vec![po("1", "i"), po("1/2+b-c", "i")])
                        * quot(
                            vec![po("1-c", "i"), po("1+2*b-2*c", "i")],
                            vec![po("1+2*b-c", "i"), po("2+2*b-2*c+m", "i")],
                        )
                        * quot(
                            vec![po("(c-n-i)/2", "n"), po("c-2*b-i", "n")],
                            vec![po("(c-n-i)/2-b", "n"), po("c-i", "n")],
                        ),
                ),
        }),
        build(Spec {
            name: "chu-shift-numerator",
            provenance: "Chu shifted-numerator 3F2 expansion, case a = -n",
            complex: &["b", "c"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![at_most("m", 4)],
            lhs: hyp(&["-n", "1+n", "b+m/2"], &["c", "1+2*b-c"], "1"),
            rhs: quot(
                vec![po("c-2*b", "m"), po("c-b-m/2", "m")],
                vec![po("2*c-2*b-1", "m"), po("1-b-m/2", "m")],
            ) * sum(
                "i",
                p("m"),
                quot(
                    vec![po("-m", "i"), po("(3-m)/2+b-c", "i")],
                    vec![po("1", "i"), po("(1-m)/2+b-c", "i")],
                ) * quot(
                    vec![po("1-c", "i"), po("1+2*b-2*c-m", "i")],
                    vec![po("2+2*b-2*c", "i"), po("1+2*b-c-m", "i")],
                ) * quot(
                    vec![po("(c-n-i)/2", "n"), po("c-2*b+m-i", "n")],
                    vec![po("(c-n+m-i)/2-b", "n"), po("c-i", "n")],
                ),
            ),
        }),
    ]
}

fn thm1_family() -> Vec<Identity> {
    let thm1_lhs = psi(
        vec![grp(&["1", "3/2"], "1"), grp(&["l-a"], "l"), grp(&["1/2+l-a"], "1+l"), grp(&["1+2*a+n"], "1+2*l")],
        vec![
            grp(&["1+n"], "-1"),
            grp(&["2+n", "1/2"], "1"),
            grp(&["1+a"], "l"),
            grp(&["3/2+a"], "1+l"),
            grp(&["1+2*l-2*a-n"], "1+2*l"),
        ],
        "-1",
    );
    let thm1_rhs = neg_one_pow(p("n")) * pow(int(4), p("2*a-l")) * po("1+2*a-l", "n")
        / (lam_den() * thm1_den() * po("1", "n"));

    let ex1_lhs = hyp(
        &["1", "3/2", "1-a", "(3-2*a)/4", "(5-2*a)/4", "(1+2*a+n)/3", "(2+2*a+n)/3", "(3+2*a+n)/3", "-n"],
        &["1/2", "1+a", "(5+2*a)/4", "(3+2*a)/4", "(5-2*a-n)/3", "(4-2*a-n)/3", "(3-2*a-n)/3", "2+n"],
        "1",
    );
    let ex1_rhs = int(2) * s("a") * lin("1-a") * lin("1+2*a") / (lin("1-a-n") * lin("2*a+n") * lin("1+2*a+4*n"))
        * quot(vec![po("2", "n")], vec![po("2*a-2", "n")]);

    let ex2_lhs = hyp_entries(
        [
            many(&["1", "3/2", "(2-a)/2", "(3-a)/2", "(5-2*a)/6", "(7-2*a)/6", "(9-2*a)/6"]),
            family("(i+2*a+n)/5", "1", "5"),
            one("-n"),
        ]
        .concat(),
        [
            many(&["1/2", "(2+a)/2", "(1+a)/2", "(7+2*a)/6", "(5+2*a)/6", "(3+2*a)/6"]),
            family("(10-i-2*a-n)/5", "1", "5"),
            one("2+n"),
        ]
        .concat(),
        "1",
    );
    let ex2_rhs = lin("2-a") * lin("1+2*a") / (lin("2-a+2*n") * lin("1+2*a+6*n"))
        * quot(vec![po("2*a-1", "n"), po("2", "n")], vec![po("2*a-4", "n"), po("2*a+1", "n")]);

    vec![
        build(Spec {
            name: "thm1",
            provenance: "Theorem 1",
            complex: &["a", "l"],
            integer: &["n"],
            pins: &[],
            constraints: vec![nonzero(lam_den()), nonzero(thm1_den())],
            lhs: thm1_lhs,
            rhs: thm1_rhs,
        }),
        build(Spec {
            name: "example1",
            provenance: "Example 1 (lambda = 1 in Theorem 1)",
            complex: &["a"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: ex1_lhs,
            rhs: ex1_rhs,
        }),
        build(Spec {
            name: "example2",
            provenance: "Example 2 (lambda = 2 in Theorem 1)",
            complex: &["a"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: ex2_lhs,
            rhs: ex2_rhs,
        }),
    ]
}

/// Ω (`theta = false`) or Θ (`theta = true`) as a Fox-Wright series in `i`.
fn omega_theta(theta: bool) -> Expr {
    let top: &[&str] = if theta {
        &["(3+m)/2-i+l", "(2+m)/2+l", "1+2*a+n"]
    } else {
        &["(3+m)/2-i+l", "1+2*a+n"]
    };
    let bottom: &[&str] = if theta {
        &["(1+m)/2-i+l", "(2-m)/2+l", "1+2*l-2*a-n"]
    } else {
        &["(1+m)/2-i+l", "1+2*l-2*a-n"]
    };
    psi(
        vec![
            grp(&["1", "3/2"], "1"),
            grp(&["(m-i)/2+l-a"], "l"),
            grp(&["(1+m-i)/2+l-a"], "1+l"),
            grp(top, "1+2*l"),
            grp(&["1-i+2*l"], "2+4*l"),
        ],
        vec![
            grp(&["1+n"], "-1"),
            grp(&["2+n", "1/2"], "1"),
            grp(&["(2-i)/2+a"], "l"),
            grp(&["(3-i)/2+a"], "1+l"),
            grp(bottom, "1+2*l"),
            grp(&["2+m-i+2*l"], "2+4*l"),
        ],
        "-1",
    )
}

fn double_sums() -> Vec<Identity> {
    let thm2_lhs = sum(
        "i",
        p("m"),
        neg_one_pow(p("i")) * quot(vec![po("-m", "i")], vec![po("1", "i")]) * omega_theta(false),
    );
    let thm2_rhs = neg_one_pow(p("n")) * pow(int(2), p("4*a-2*l-m-1")) * po("1+2*a-l-m/2", "n")
        / (thm1_den() * lam_den() * po("1", "n"));
    let thm3_lhs = sum("i", p("m"), quot(vec![po("-m", "i")], vec![po("1", "i")]) * omega_theta(true));
    let thm3_rhs = neg_one_pow(p("n")) * pow(int(2), p("4*a-2*l-m-1")) * po("1+2*a-l+m/2", "n") * po("l-2*a-m/2", "m")
        / (thm1_den() * lam_den() * po("1", "n"));
    vec![
        build(Spec {
            name: "thm2",
            provenance: "Theorem 2",
            complex: &["a", "l"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![nonzero(lam_den()), nonzero(thm1_den())],
            lhs: thm2_lhs,
            rhs: thm2_rhs,
        }),
        build(Spec {
            name: "thm3",
            provenance: "Theorem 3",
            complex: &["a", "l"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![nonzero(lam_den()), nonzero(thm1_den())],
            lhs: thm3_lhs,
            rhs: thm3_rhs,
        }),
    ]
}

/// A(±λ) (`with_half = false`) or B(±λ) (`with_half = true`).
fn reciprocal_series(with_half: bool, negate: bool) -> Expr {
    let l = if negate { "-l" } else { "l" };
    let r = |s: &str| s.replace('L', l);
    let num_head = if with_half { grp(&["1", "3/2"], "1") } else { grp(&["1"], "1") };
    let den_head = if with_half { grp(&["2+n", "1/2"], "1") } else { grp(&["2+n"], "1") };
    psi(
        vec![
            num_head,
            grp(&[&r("(1+(L)-a)/2")], &r("(L)-1/2")),
            grp(&[&r("(2+(L)-a)/2")], &r("(L)+1/2")),
            grp(&[&r("(L)+a+n")], &r("2*(L)")),
        ],
        vec![
            grp(&["1+n"], "-1"),
            den_head,
            grp(&[&r("(1+(L)+a)/2")], &r("(L)-1/2")),
            grp(&[&r("(2+(L)+a)/2")], &r("(L)+1/2")),
            grp(&[&r("1+(L)-a-n")], &r("2*(L)")),
        ],
        "-1",
    )
}

fn reciprocal_family() -> Vec<Identity> {
    let c = ["(3+2*a+2*n)/6", "(5+2*a+2*n)/6", "(7+2*a+2*n)/6"];
    let d = ["(9-2*a-2*n)/6", "(7-2*a-2*n)/6", "(5-2*a-2*n)/6"];
    let cat = |a: &[&str], b: &[&str], c: &[&str]| -> Vec<String> {
        a.iter().chain(b).chain(c).map(|s| s.to_string()).collect()
    };
    let hyp_s = |num: Vec<String>, den: Vec<String>| {
        let num: Vec<&str> = num.iter().map(String::as_str).collect();
        let den: Vec<&str> = den.iter().map(String::as_str).collect();
        hyp(&num, &den, "1")
    };

    let ex3_lhs = int(1) / lin("1+2*a") * hyp(&["1", "(5-2*a)/4", "1/2+a+n", "-n"], &["(5+2*a)/4", "3/2-a-n", "2+n"], "1")
        + int(1) / lin("1-2*a") * hyp(&["1", "(3-2*a)/4", "1/2+a+n", "-n"], &["(3+2*a)/4", "3/2-a-n", "2+n"], "1");
    let ex3_rhs = int(2) / (lin("1-2*a") * lin("1+2*a+4*n"))
        * quot(vec![po("2", "n"), po("a", "n")], vec![po("1/2+a", "n"), po("-1/2+a", "n")]);

    let ex4_lhs = int(1) / lin("3+2*a")
        * hyp_s(
            cat(&["1", "(5-2*a)/4", "(7-2*a)/8", "(11-2*a)/8"], &c, &["-n"]),
            cat(&["(5+2*a)/4", "(7+2*a)/8", "(11+2*a)/8"], &d, &["2+n"]),
        )
        + int(1) / lin("3-2*a")
            * hyp_s(
                cat(&["1", "(3-2*a)/4", "(5-2*a)/8", "(9-2*a)/8"], &c, &["-n"]),
                cat(&["(3+2*a)/4", "(5+2*a)/8", "(9+2*a)/8"], &d, &["2+n"]),
            );
    let ex4_rhs = int(6) / (lin("3-2*a+4*n") * lin("3+2*a+8*n"))
        * quot(vec![po("2", "n"), po("a", "n")], vec![po("3/2+a", "n"), po("-3/2+a", "n")]);

    let ex5_lhs = int(1) / lin("1+2*a")
        * hyp(&["1", "3/2", "(5-2*a)/4", "1/2+a+n", "-n"], &["1/2", "(5+2*a)/4", "3/2-a-n", "2+n"], "1")
        - int(1) / lin("1-2*a")
            * hyp(&["1", "3/2", "(3-2*a)/4", "1/2+a+n", "-n"], &["1/2", "(3+2*a)/4", "3/2-a-n", "2+n"], "1");
    let ex5_rhs = int(4) / (lin("2*a-1") * lin("1+2*a+4*n"))
        * quot(vec![po("1", "1+n"), po("a", "1+n")], vec![po("1/2+a", "n"), po("-1/2+a", "n")]);

    let ex6_lhs = int(1) / lin("3+2*a")
        * hyp_s(
            cat(&["1", "3/2", "(5-2*a)/4", "(7-2*a)/8", "(11-2*a)/8"], &c, &["-n"]),
            cat(&["1/2", "(5+2*a)/4", "(7+2*a)/8", "(11+2*a)/8"], &d, &["2+n"]),
        )
        - int(1) / lin("3-2*a")
            * hyp_s(
                cat(&["1", "3/2", "(3-2*a)/4", "(5-2*a)/8", "(9-2*a)/8"], &c, &["-n"]),
                cat(&["1/2", "(3+2*a)/4", "(5+2*a)/8", "(9+2*a)/8"], &d, &["2+n"]),
            );
    let ex6_rhs = int(4) / (lin("2*a-3-4*n") * lin("3+2*a+8*n"))
        * quot(vec![po("1", "1+n"), po("a", "1+n")], vec![po("3/2+a", "n"), po("-3/2+a", "n")]);

    let cor1_rhs = neg_one_pow(p("n+1")) * pow(int(2), p("2*a+1")) * s("l") * po("a", "n")
        / (reciprocal_den() * po("1", "n"));
    let cor2_rhs = neg_one_pow(p("n")) * pow(int(4), p("a")) * po("a", "1+n") / (reciprocal_den() * po("1", "n"));

    let one_var = |name: &'static str, prov: &'static str, lhs: Expr, rhs: Expr| {
        build(Spec {
            name,
            provenance: prov,
            complex: &["a"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs,
            rhs,
        })
    };
    vec![
        build(Spec {
            name: "cor1",
            provenance: "Corollary 1",
            complex: &["a", "l"],
            integer: &["n"],
            pins: &[],
            constraints: vec![nonzero(reciprocal_den())],
            lhs: reciprocal_series(false, false) - reciprocal_series(false, true),
            rhs: cor1_rhs,
        }),
        one_var("example3", "Example 3 (lambda = 1/2 in Corollary 1)", ex3_lhs, ex3_rhs),
        one_var("example4", "Example 4 (lambda = 3/2 in Corollary 1)", ex4_lhs, ex4_rhs),
        build(Spec {
            name: "cor2",
            provenance: "Corollary 2",
            complex: &["a", "l"],
            integer: &["n"],
            pins: &[],
            constraints: vec![nonzero(reciprocal_den())],
            lhs: reciprocal_series(true, false) + reciprocal_series(true, true),
            rhs: cor2_rhs,
        }),
        one_var("example5", "Example 5 (lambda = 1/2 in Corollary 2)", ex5_lhs, ex5_rhs),
        one_var("example6", "Example 6 (lambda = 3/2 in Corollary 2)", ex6_lhs, ex6_rhs),
    ]
}

fn third_family() -> Vec<Identity> {
    let thm4_lhs = psi(
        vec![grp(&["1", "3/2"], "1"), grp(&["1/2-a+b", "a+n"], "1/2"), grp(&["b-a", "-1/2+a+n"], "-1/2")],
        vec![
            grp(&["1+n"], "-1"),
            grp(&["2+n", "1/2"], "1"),
            grp(&["1+a-c", "1/2-a+b+c"], "1/2"),
            grp(&["1/2+a-c", "b+c-a"], "-1/2"),
        ],
        "-1",
    );
    let thm4_rhs = int(2) * quot(
        vec![po("1/2+2*a-b-c", "n"), po("b", "n"), po("c", "n")],
        vec![po("1", "n"), po("1+2*a-2*b", "n")],
    ) * quot(vec![g("2*a-1+n"), g("2*b-2*a")], vec![g("1+2*a-2*c+n"), g("2*b+2*c-2*a+n")]);

    let cor3_lhs = psi(
        vec![grp(&["1", "3/2"], "1"), grp(&["a+n"], "1/2"), grp(&["-1/2+a+n"], "-1/2")],
        vec![
            grp(&["1+n"], "-1"),
            grp(&["2+n", "1/2"], "1"),
            grp(&["1+a-c"], "1/2"),
            grp(&["1/2+a-c"], "-1/2"),
        ],
        "-1",
    );
    let cor3_rhs = int(1) / pow(int(2), p("2*c+2*n-1")) * quot(vec![po("c", "n")], vec![po("1", "n")])
        * quot(vec![g("2*a-1+n")], vec![g("1+2*a-2*c+n")]);

    let cor4_lhs = hyp_entries(
        [
            many(&["1", "3/2"]),
            family("2*a+2*n+2*i-2", "1", "m"),
            family("3-2*a-2*n-2*i", "1", "m"),
            one("-n"),
        ]
        .concat(),
        [
            many(&["1/2"]),
            family("2*a+2*n+2*i-1", "1", "m"),
            family("4-2*a-2*n-2*i", "1", "m"),
            one("2+n"),
        ]
        .concat(),
        "1",
    );
    let cor4_rhs = neg_one_pow(p("n"))
        * quot(vec![po("2", "n"), po("m", "n")], vec![po("2*a-1+n", "n"), po("2*a-1+2*m+2*n", "n")]);

    let thm5_lhs = psi(
        vec![grp(&["1", "3/2", "1-a-b", "b-a", "a+n"], "1"), grp(&["(1-a-b)/2", "(b-a)/2"], "-1/2")],
        vec![
            grp(&["1+n"], "-1"),
            grp(&["2+n", "2-a-n", "1/2"], "1"),
            grp(&["(1-a-b)/2", "(b-a)/2"], "1/2"),
        ],
        "1/4",
    );
    let thm5_rhs = quot(vec![po("b", "n"), po("1-b", "n")], vec![po("a+b", "n"), po("1+a-b", "n")])
        * quot(
            vec![g("a+n"), g("1-a-b"), g("b-a")],
            vec![int(2), g("1+n"), g("2-a")],
        );

    let cor5_lhs = hyp_entries(
        [
            many(&["1", "3/2"]),
            family("1-a+2*i", "0", "m"),
            family("a+2*i", "1", "m"),
            family("1-a-2*i", "1", "m"),
            family("2+a-2*i", "1", "m"),
            many(&["a+n", "-n"]),
        ]
        .concat(),
        [
            many(&["1/2"]),
            family("1+a+2*i", "0", "m"),
            family("-a+2*i", "1", "m"),
            family("1+a-2*i", "1", "m"),
            family("2-a-2*i", "1", "m"),
            many(&["2-a-n", "2+n"]),
        ]
        .concat(),
        "1",
    );
    let cor5_rhs = neg_one_pow(p("n"))
        * quot(
            vec![po("-2*m", "n"), po("1+2*m", "n"), po("2", "n")],
            vec![po("a-1", "n"), po("a-2*m", "n"), po("1+a+2*m", "n")],
        );

    vec![
        build(Spec {
            name: "thm4",
            provenance: "Theorem 4",
            complex: &["a", "b", "c"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: thm4_lhs,
            rhs: thm4_rhs,
        }),
        build(Spec {
            name: "cor3",
            provenance: "Corollary 3 (limit b to infinity in Theorem 4)",
            complex: &["a", "c"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: cor3_lhs,
            rhs: cor3_rhs,
        }),
        build(Spec {
            name: "cor4",
            provenance: "Corollary 4 (c = 1 - m - n in Corollary 3)",
            complex: &["a"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![at_most("m", 4)],
            lhs: cor4_lhs,
            rhs: cor4_rhs,
        }),
        build(Spec {
            name: "thm5",
            provenance: "Theorem 5",
            complex: &["a", "b"],
            integer: &["n"],
            pins: &[],
            constraints: vec![],
            lhs: thm5_lhs,
            rhs: thm5_rhs,
        }),
        build(Spec {
            name: "cor5",
            provenance: "Corollary 5 (b = -2m in Theorem 5)",
            complex: &["a"],
            integer: &["m", "n"],
            pins: &[],
            constraints: vec![at_most("m", 4)],
            lhs: cor5_lhs,
            rhs: cor5_rhs,
        }),
    ]
}

/// Every registry entry, unsorted.
pub fn build_registry() -> Vec<Identity> {
    [classical(), thm1_family(), double_sums(), reciprocal_family(), third_family()].concat()
}
