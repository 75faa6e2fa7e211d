use foxwright::inversion::{
    backward_sequence, forward_sequence, forward_transform, roundtrip_error, sample_case, InversionContext,
};
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 8;

fn c64() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn context() -> impl Strategy<Value = InversionContext> {
    (c64(), c64(), c64())
        .prop_filter_map("well posed", |(x, y, z)| InversionContext::new(x, y, z).ok())
        .prop_filter("guarded", |c| c.is_well_posed(N))
}

fn seq() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(c64(), N + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn transforms_are_linear(ctx in context(), u in seq(), v in seq(), s in c64(), t in c64()) {
        let mix: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| s * a + t * b).collect();
        type Transform = fn(&[Complex64], &InversionContext, usize) -> Result<Vec<Complex64>, foxwright::inversion::InversionError>;
        for op in [forward_sequence as Transform, backward_sequence] {
            let whole = op(&mix, &ctx, N).unwrap();
            let (fu, fv) = (op(&u, &ctx, N).unwrap(), op(&v, &ctx, N).unwrap());
            let parts: Vec<Complex64> = fu.iter().zip(&fv).map(|(a, b)| s * a + t * b).collect();
            // Scale by the parts so cancellation in s*u + t*v is not charged.
            let scale = fu.iter().zip(&fv).map(|(a, b)| (s * a).norm() + (t * b).norm()).fold(1.0, f64::max);
            let err = whole.iter().zip(&parts).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
            prop_assert!(err <= 1e-12, "{err}");
        }
    }

    #[test]
    fn forward_is_lower_triangular(ctx in context(), g in seq(), bump in c64(), n in 0usize..N) {
        let before = forward_transform(&g, &ctx, n).unwrap();
        let mut h = g.clone();
        h[n + 1] += bump;
        prop_assert_eq!(before, forward_transform(&h, &ctx, n).unwrap());
    }
}

#[test]
fn duality_on_sampled_cases() {
    for trial in 0..300 {
        let (ctx, seq) = sample_case(11, trial, 10).expect("sampler finds a context");
        let err = roundtrip_error(&seq, &ctx, 10).unwrap();
        assert!(err <= 1e-8, "trial {trial}: {err} at {ctx:?}");
    }
}
