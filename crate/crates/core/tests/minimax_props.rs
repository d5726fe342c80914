use bernstein_core::minimax::{
    bernstein_nondiff, best_uniform_approx, chebyshev_lobatto, chebyshev_t, en_profile, markov_constant, tower,
    Basis, Domain, MarkovMethod, Method, SampledFn, Subset,
};
use proptest::prelude::*;

fn interval() -> Domain {
    Domain::Interval { a: -1.0, b: 1.0 }
}

/// `∑ a_j·exp(b_j·x) + c·|x − s|`
fn generated() -> impl Strategy<Value = (Vec<(f64, f64)>, f64, f64)> {
    (
        prop::collection::vec((-2.0f64..2.0, -3.0f64..3.0), 1..4),
        -1.0f64..1.0,
        -0.9f64..0.9,
    )
}

fn sample((terms, c, s): &(Vec<(f64, f64)>, f64, f64), points: usize) -> SampledFn {
    let f = |x: f64| terms.iter().map(|(a, b)| a * libm::exp(b * x)).sum::<f64>() + c * libm::fabs(x - s);
    SampledFn::from_fn(interval(), chebyshev_lobatto(points, -1.0, 1.0), "generated", f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exchange_equioscillates(g in generated(), n in 1usize..12) {
        let f = sample(&g, 240);
        let a = best_uniform_approx(&f, n, Basis::Chebyshev).unwrap();
        prop_assume!(a.error > 0.0);
        prop_assert_eq!(a.coordinates[0].method, Method::Exchange);
        let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(a.equioscillation(1e-9 * scale).unwrap() >= n + 2);
    }

    #[test]
    fn error_nonincreasing_in_degree(g in generated()) {
        let f = sample(&g, 160);
        let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut prev = f64::INFINITY;
        for n in 0..10 {
            let e = best_uniform_approx(&f, n, Basis::Chebyshev).unwrap().error;
            prop_assert!(e <= prev + 1e-12 * scale, "n={} {} > {}", n, e, prev);
            prev = e;
        }
    }

    #[test]
    fn chebyshev_profile_vanishes_from_its_degree(m in 1usize..10) {
        // 2520 is divisible by every m here, so all extrema of T_m are grid points
        let f = SampledFn::from_fn(interval(), chebyshev_lobatto(2520, -1.0, 1.0), "T", |x| chebyshev_t(m, x)).unwrap();
        let p = en_profile(&f, 12, Basis::Chebyshev).unwrap();
        let v = p.errors.values(12);
        for (i, e) in v.iter().enumerate() {
            if i + 1 >= m {
                prop_assert_eq!(*e, 0.0);
            } else {
                prop_assert!((e - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nondiff_remainder(x in -1.0f64..=1.0, b in 1u32..4) {
        let lo = bernstein_nondiff(x, b).unwrap();
        let hi = bernstein_nondiff(x, 8).unwrap();
        prop_assert!((hi.value - lo.value).abs() <= libm::exp2(lo.remainder_log2));
        prop_assert!((hi.value - lo.value).abs() <= 2.0 / tower(b + 1).unwrap() as f64);
    }
}

#[test]
fn remainder_can_exceed_first_omitted_term() {
    // at x = 0 all omitted cosines equal 1: 1/4 + 1/16 + 1/65536 > 1/4
    let d = bernstein_nondiff(0.0, 8).unwrap().value - bernstein_nondiff(0.0, 1).unwrap().value;
    assert_eq!(d, 0.25 + 0.0625 + 1.0 / 65536.0);
}

#[test]
fn markov_brackets() {
    for n in 1..=8 {
        let t = markov_constant(Basis::Trig, n, Subset::Full).unwrap();
        assert_eq!(t.method, MarkovMethod::Exact);
        assert_eq!(t.upper, n as f64);
        for s in [Subset::Full, Subset::Interval(-0.3, 0.8)] {
            let b = markov_constant(Basis::Chebyshev, n, s).unwrap();
            assert!(b.lower <= b.upper, "{b:?}");
        }
        let arc = markov_constant(Basis::Trig, n, Subset::Interval(1.0, 2.5)).unwrap();
        assert!(arc.lower <= arc.upper);
    }
}
