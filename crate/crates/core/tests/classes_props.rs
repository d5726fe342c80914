use bernstein_core::classes::{first_class_verdict, second_class_verdict, ClassConfig, VerdictStatus};
use bernstein_core::error_seq::{ErrorSeq, Provenance, TailRule};
use bernstein_core::rates::{phi_kappa_member, ClosedForm, ConvergenceStatus, RateExpr, RateFn};
use proptest::prelude::*;

const HORIZON: u64 = 2_000;

fn cfg() -> ClassConfig {
    ClassConfig { horizon: HORIZON, ..ClassConfig::default() }
}

fn power_log(coef: f64, power: f64, log_power: f64) -> RateExpr {
    RateExpr::closed(ClosedForm { coef, power, log_power, log_arg_shift: 1.0, ..ClosedForm::default() })
}

fn scale_strategy() -> impl Strategy<Value = RateFn> {
    (1u32..=20, 0i32..=2, 1u32..=4).prop_map(|(a, b, c)| {
        RateFn::scale(power_log(c as f64 / 4.0, a as f64 / 10.0, b as f64)).unwrap()
    })
}

fn weight_strategy() -> impl Strategy<Value = RateFn> {
    (11u32..=30, -1i32..=2, 1u32..=4).prop_map(|(p, q, c)| {
        RateFn::weight(power_log(c as f64 / 4.0, p as f64 / 10.0, q as f64)).unwrap()
    })
}

fn errors_strategy() -> impl Strategy<Value = ErrorSeq> {
    prop_oneof![
        scale_strategy().prop_map(|phi| ErrorSeq::exp_neg_inv(&phi).unwrap()),
        (1u32..=8).prop_map(|p| {
            ErrorSeq::from_rule(TailRule::Power { coef: 1.0, power: p as f64 / 2.0 }, Provenance::Constructed).unwrap()
        }),
        (1u32..=9).prop_map(|r| {
            ErrorSeq::from_rule(TailRule::Geometric { ratio: r as f64 / 10.0 }, Provenance::Constructed).unwrap()
        }),
    ]
}

fn first_member(e: &ErrorSeq, k: &RateFn) -> bool {
    let v = first_class_verdict(e, k, &cfg());
    let exact = v.exact.expect("closed-form instance");
    assert_eq!(exact.member, v.status == VerdictStatus::DivergenceCertified);
    exact.member
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_law(e in errors_strategy(), k1 in weight_strategy(), k2 in weight_strategy()) {
        let join = RateExpr::Join { left: Box::new(k1.expr().clone()), right: Box::new(k2.expr().clone()) };
        let k = RateFn::weight(join).unwrap();
        prop_assert_eq!(first_member(&e, &k), first_member(&e, &k1) || first_member(&e, &k2));
    }

    #[test]
    fn second_class_monotone(e in errors_strategy(), phi in scale_strategy(), phi_p in scale_strategy()) {
        let (a, b) = (phi.asymptote().unwrap(), phi_p.asymptote().unwrap());
        prop_assume!(b.cmp_growth(&a) != core::cmp::Ordering::Greater);
        let vp = second_class_verdict(&e, &phi_p, &cfg());
        if vp.is_member() == Some(true) {
            prop_assert_eq!(second_class_verdict(&e, &phi, &cfg()).is_member(), Some(true));
        }
    }

    #[test]
    fn phi_kappa_direction(e in errors_strategy(), k in weight_strategy(), phi in scale_strategy()) {
        let k = k.with_horizon(HORIZON).unwrap();
        let phi = phi.with_horizon(HORIZON).unwrap();
        prop_assume!(phi_kappa_member(&k, &phi).status == ConvergenceStatus::Converges);
        prop_assume!(first_member(&e, &k));
        let v = second_class_verdict(&e, &phi, &cfg());
        prop_assert_eq!(v.is_member(), Some(true));
    }

    #[test]
    fn witnesses_meet_margin(e in errors_strategy(), phi in scale_strategy()) {
        let v = second_class_verdict(&e, &phi, &cfg());
        let w = v.witness.unwrap();
        for (&n, &m) in w.indices.iter().zip(&w.margins) {
            prop_assert!(m <= 0.5);
            let en = e.get(n);
            if en >= f64::MIN_POSITIVE {
                let direct = libm::pow(en, phi.eval(n));
                prop_assert!((direct - m).abs() <= 1e-12 * direct.max(1e-300));
            }
        }
        prop_assert_eq!(v.status == VerdictStatus::InWitnessed, w.total >= 3);
    }
}
