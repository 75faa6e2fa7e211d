use foxwright::numerics::{gamma, sum_scaled, SignedLogValue};
use foxwright::series::{
    eval_series, series_term, termination_index, Binding, Entry, FWEntry, ParamExpr, Rational, SeriesSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn param() -> impl Strategy<Value = Complex64> {
    (0.2f64..3.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn small_arg() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.25, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn sym(name: &str) -> ParamExpr {
    ParamExpr::symbol(name)
}

fn plain(name: &str) -> Entry {
    Entry::Single(FWEntry::plain(sym(name)))
}

fn unit(name: &str) -> Entry {
    Entry::Single(FWEntry::new(sym(name), ParamExpr::one()))
}

/// Binds `a0..`, `b0..`, `z` and returns the matching entry lists.
fn bind(a: &[Complex64], b: &[Complex64], z: Complex64) -> (Binding, Vec<String>, Vec<String>) {
    let mut bind = Binding::new().with_complex("z", z);
    let an: Vec<String> = (0..a.len()).map(|i| format!("a{i}")).collect();
    let bn: Vec<String> = (0..b.len()).map(|i| format!("b{i}")).collect();
    for (n, v) in an.iter().zip(a) {
        bind.set_complex(n, *v);
    }
    for (n, v) in bn.iter().zip(b) {
        bind.set_complex(n, *v);
    }
    (bind, an, bn)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn gamma_ratio(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for x in a {
        r *= gamma(*x).unwrap();
    }
    for x in b {
        r /= gamma(*x).unwrap();
    }
    r
}

fn sum_terms(spec: &SeriesSpec, b: &Binding, k_max: u64, reverse: bool) -> (Complex64, f64) {
    let mut terms: Vec<SignedLogValue> = (0..=k_max).map(|k| series_term(spec, b, k).unwrap()).collect();
    if reverse {
        terms.reverse();
    }
    let abs: f64 = terms.iter().map(|t| t.abs()).sum();
    (sum_scaled(&terms).to_complex(), abs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Unit-coefficient Fox-Wright equals the gamma-weighted pFq.
    #[test]
    fn fox_wright_matches_pfq_nonterminating(
        a in prop::collection::vec(param(), 1..4),
        extra in prop::collection::vec(param(), 0..2),
        z in small_arg(),
    ) {
        let mut bs = a.iter().map(|x| x + 0.5).collect::<Vec<_>>();
        bs.truncate(a.len());
        bs.extend(extra);
        let (b, an, bn) = bind(&a, &bs, z);
        let f = SeriesSpec::pfq(an.iter().map(|n| plain(n)).collect(), bn.iter().map(|n| plain(n)).collect(), sym("z"));
        let psi = SeriesSpec::fox_wright(an.iter().map(|n| unit(n)).collect(), bn.iter().map(|n| unit(n)).collect(), sym("z"));
        let lhs = eval_series(&psi, &b, TOL).unwrap();
        let rhs = gamma_ratio(&a, &bs) * eval_series(&f, &b, TOL).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-10, "{lhs} vs {rhs}");
    }

    /// F[-n, a | b](z) = n! Γ(b)/Γ(a) Ψ[(a;1) | (b;1), (1+n;-1)](-z).
    #[test]
    fn fox_wright_matches_pfq_terminating(
        n in 0i64..=10,
        a in prop::collection::vec(param(), 1..3),
        bs in prop::collection::vec(param(), 1..3),
        zr in -2.0f64..2.0, zi in -2.0f64..2.0,
    ) {
        let z = Complex64::new(zr, zi);
        let (mut b, an, bn) = bind(&a, &bs, z);
        b.set_int("n", n);
        let mut fnum = vec![plain_expr(sym("n").neg())];
        fnum.extend(an.iter().map(|s| plain(s)));
        let f = SeriesSpec::pfq(fnum, bn.iter().map(|s| plain(s)).collect(), sym("z"));
        let mut pden: Vec<Entry> = bn.iter().map(|s| unit(s)).collect();
        pden.push(Entry::Single(FWEntry::new(sym("n").add(&ParamExpr::one()), ParamExpr::int(-1))));
        let psi = SeriesSpec::fox_wright(an.iter().map(|s| unit(s)).collect(), pden, sym("z").neg());
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let lhs = eval_series(&f, &b, TOL).unwrap();
        let rhs = fact * gamma_ratio(&bs, &a) * eval_series(&psi, &b, TOL).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() / scale <= 1e-10, "{lhs} vs {rhs}");
    }
}

fn plain_expr(p: ParamExpr) -> Entry {
    Entry::Single(FWEntry::plain(p))
}

/// A random terminating spec: pFq with a `-n` numerator, or Fox-Wright with a
/// negative-integer denominator coefficient.
fn terminating_case() -> impl Strategy<Value = (SeriesSpec, Binding, u64)> {
    let pfq = (0i64..=12, prop::collection::vec(param(), 0..3), prop::collection::vec(param(), 0..3), param())
        .prop_map(|(n, a, bs, z)| {
            let (mut b, an, bn) = bind(&a, &bs, z);
            b.set_int("n", n);
            let mut num = vec![plain_expr(sym("n").neg())];
            num.extend(an.iter().map(|s| plain(s)));
            (SeriesSpec::pfq(num, bn.iter().map(|s| plain(s)).collect(), sym("z")), b, n as u64)
        });
    let fw = (1i64..=3, 1i64..=20, prop::collection::vec(param(), 0..3), param())
        .prop_map(|(step, beta, a, z)| {
            let (b, an, _) = bind(&a, &[], z);
            let den = vec![Entry::Single(FWEntry::new(ParamExpr::int(beta), ParamExpr::int(-step)))];
            let num = an.iter().map(|s| Entry::Single(FWEntry::new(sym(s), ParamExpr::constant(Rational::new(1, 2))))).collect();
            let k = ((beta + step - 1) / step - 1).max(0) as u64;
            (SeriesSpec::fox_wright(num, den, sym("z")), b, k)
        });
    prop_oneof![pfq, fw]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn terms_vanish_past_termination((spec, b, k) in terminating_case()) {
        prop_assert_eq!(termination_index(&spec, &b).unwrap(), Some(k));
        prop_assert!(!series_term(&spec, &b, k).unwrap().is_zero());
        for j in k + 1..=k + 10 {
            prop_assert!(series_term(&spec, &b, j).unwrap().is_zero(), "term {j} of {spec:?}");
        }
    }

    #[test]
    fn entry_order_does_not_matter(
        a in prop::collection::vec(param(), 1..5),
        bs in prop::collection::vec(param(), 1..5),
        n in 0i64..=12,
        z in small_arg(),
        seed in any::<u64>(),
    ) {
        let (mut b, an, bn) = bind(&a, &bs, z);
        b.set_int("n", n);
        let mut num: Vec<Entry> = vec![plain_expr(sym("n").neg())];
        num.extend(an.iter().map(|s| plain(s)));
        let den: Vec<Entry> = bn.iter().map(|s| plain(s)).collect();
        let base = eval_series(&SeriesSpec::pfq(num.clone(), den.clone(), sym("z")), &b, TOL).unwrap();
        let (mut pn, mut pd) = (num, den);
        shuffle(&mut pn, seed);
        shuffle(&mut pd, seed.rotate_left(17));
        let shuffled = eval_series(&SeriesSpec::pfq(pn, pd, sym("z")), &b, TOL).unwrap();
        prop_assert_eq!(base, shuffled);

        let coeffs = [Rational::new(1, 2), Rational::from_integer(1), Rational::new(3, 2)];
        let fw_num: Vec<Entry> = an.iter().enumerate()
            .map(|(i, s)| Entry::Single(FWEntry::new(sym(s), ParamExpr::constant(coeffs[i % 3])))).collect();
        let fw_den: Vec<Entry> = bn.iter().enumerate()
            .map(|(i, s)| Entry::Single(FWEntry::new(sym(s), ParamExpr::constant(coeffs[(i + 1) % 3] + Rational::from_integer(1))))).collect();
        let base = eval_series(&SeriesSpec::fox_wright(fw_num.clone(), fw_den.clone(), sym("z")), &b, TOL);
        let (mut pn, mut pd) = (fw_num, fw_den);
        shuffle(&mut pn, seed ^ 0x9e37);
        shuffle(&mut pd, seed ^ 0x79b9);
        let shuffled = eval_series(&SeriesSpec::fox_wright(pn, pd, sym("z")), &b, TOL);
        prop_assert_eq!(base, shuffled);
    }

    #[test]
    fn reverse_summation_agrees((spec, b, k) in terminating_case()) {
        let (fwd, abs) = sum_terms(&spec, &b, k, false);
        let (rev, _) = sum_terms(&spec, &b, k, true);
        // Only well-conditioned sums can promise 1e-12 in binary64.
        prop_assume!(abs <= 1e3 * fwd.norm());
        prop_assert!(rel(rev, fwd) <= 1e-12, "{fwd} vs {rev}");
        let direct = eval_series(&spec, &b, TOL).unwrap();
        prop_assert!(rel(direct, fwd) <= 1e-12, "{direct} vs {fwd}");
    }
}

fn shuffle<T>(v: &mut [T], seed: u64) {
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
}
