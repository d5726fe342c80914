use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;

fn scale(e: RateExpr) -> RateFn {
    RateFn::scale(e).unwrap()
}

fn weight(e: RateExpr) -> RateFn {
    RateFn::weight(e).unwrap()
}

fn inv(p: f64) -> RateFn {
    scale(RateExpr::power(1.0, p))
}

/// `(s + ln n)^s / n`, the Φ_κ example.
fn log_boosted(s: f64) -> RateFn {
    scale(RateExpr::closed(ClosedForm { power: 1.0, log_power: -s, log_shift: s, ..ClosedForm::default() }))
}

fn one_plus_log_over_n() -> RateFn {
    scale(RateExpr::closed(ClosedForm { power: 1.0, log_power: -1.0, log_shift: 1.0, ..ClosedForm::default() }))
}

fn inv_log() -> RateFn {
    scale(RateExpr::closed(ClosedForm { log_power: 1.0, log_arg_shift: 1.0, ..ClosedForm::default() }))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn sigma_of_geometric_is_closed() {
    let k = weight(RateExpr::exponential(1.0, 0.5));
    let s = sigma(&k).unwrap();
    assert!(!s.is_approximate());
    for n in 1..60 {
        assert_eq!(s.eval(n), libm::scalbn(1.0, 1 - n as i32));
    }
}

#[test]
fn sigma_of_inverse_square() {
    let k = weight(RateExpr::power(1.0, 2.0));
    let s = sigma(&k).unwrap();
    let pi2_6 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
    assert!((s.eval(1) - pi2_6).abs() < 1e-6);
    // Oracle: ψ'(n) ~ 1/n + 1/(2n²) + 1/(6n³) for the tail at n = 1000.
    let n = 1000.0f64;
    let trigamma = 1.0 / n + 0.5 / (n * n) + 1.0 / (6.0 * n * n * n);
    assert!(rel(s.eval(1000), trigamma) < 1e-9);
    assert_eq!(equivalent(&s, &inv(1.0)), Relation::Equivalent);
    let a = s.asymptote().unwrap();
    assert!((a.power - 1.0).abs() < 1e-15 && a.log_power == 0.0);
}

#[test]
fn sigma_rejects_non_summable() {
    let harmonic = RateFn::from_parts(RateExpr::power(1.0, 1.0), Role::Weight, Certificate::default(), 1000);
    assert!(harmonic.is_err());
}

#[test]
fn equivalence_examples() {
    assert_eq!(equivalent(&inv(1.0), &scale(RateExpr::power(5.0, 1.0))), Relation::Equivalent);
    assert_eq!(equivalent(&inv(2.0), &inv(1.0)), Relation::StrictlySmaller);
    assert_eq!(equivalent(&one_plus_log_over_n(), &inv(1.0)), Relation::StrictlyLarger);
    let c = compare(&one_plus_log_over_n(), &inv(1.0));
    assert!(c.certified);
}

#[test]
fn lattice_examples() {
    let j = lattice_join(&inv(1.0), &inv(2.0)).unwrap();
    let m = lattice_meet(&inv(1.0), &inv(1.0)).unwrap();
    let e = scale(RateExpr::exponential(1.0, (-1.0f64).exp()));
    let je = lattice_join(&e, &inv(1.0)).unwrap();
    for n in 1..=2000 {
        assert_eq!(j.eval(n), 1.0 / n as f64);
        assert_eq!(m.eval(n), 1.0 / n as f64);
        assert_eq!(je.eval(n), 1.0 / n as f64);
    }
}

#[test]
fn family_bounds() {
    let single = [inv(1.0)];
    let lb = family_lower_bound(&single).unwrap();
    let ub = family_upper_bound(&single).unwrap();
    assert_eq!(equivalent(&lb, &inv(1.0)), Relation::Equivalent);
    assert_eq!(equivalent(&ub, &inv(1.0)), Relation::Equivalent);
    assert!(ub.is_approximate());

    let pair = [inv(1.0), inv(2.0)];
    let lb = family_lower_bound(&pair).unwrap();
    assert_eq!(lb.eval(1), 1.0);
    for n in 2..500 {
        assert_eq!(lb.eval(n), 1.0 / (n * n) as f64);
    }

    let phi = one_plus_log_over_n();
    let triple: Vec<RateFn> = [1.0, 2.0, 4.0].iter().map(|c| scaled(&phi, *c).unwrap()).collect();
    let lb = family_lower_bound(&triple).unwrap();
    assert_eq!(equivalent(&lb, &phi), Relation::Equivalent);
    assert!(family_lower_bound(&[]).is_err());
}

#[test]
fn phi_kappa_examples() {
    for phi in [inv(1.0), inv(0.5), inv_log(), one_plus_log_over_n()] {
        let k = kappa_phi(&phi).unwrap();
        let v = phi_kappa_member(&k, &phi);
        assert_eq!(v.status, ConvergenceStatus::Converges);
        assert!(v.certificate_used);
    }
    let k = weight(RateExpr::power(1.0, 2.0));
    assert_eq!(phi_kappa_member(&k, &inv(1.0)).status, ConvergenceStatus::Diverges);
    assert_eq!(phi_kappa_member(&k, &log_boosted(2.0)).status, ConvergenceStatus::Converges);
}

#[test]
fn weight_from_scale_examples() {
    let phi = scale(RateExpr::exponential(2.0, 0.5));
    let k = weight_from_scale(&phi).unwrap();
    for n in 1..50 {
        assert_eq!(k.eval(n), libm::scalbn(1.0, -(n as i32)));
    }
    let k = weight_from_scale(&inv(1.0)).unwrap();
    let s = sigma(&k).unwrap();
    for n in 1..200u64 {
        let nf = n as f64;
        assert!(rel(k.eval(n), 1.0 / (nf * (nf + 1.0))) < 1e-15);
        assert_eq!(s.eval(n), 1.0 / nf);
    }
    let phi = inv_log();
    let k = weight_from_scale(&phi).unwrap();
    for n in 1..200u64 {
        let nf = n as f64;
        let direct = 1.0 / libm::log(nf + 1.0) - 1.0 / libm::log(nf + 2.0);
        assert!(k.eval(n) > 0.0 && rel(k.eval(n), direct) < 1e-12);
    }
}

#[test]
fn weight_from_step_scale_uses_dyadic_shift() {
    let step = RateExpr::Step { breakpoints: vec![1, 3, 10, 20], values: vec![1.0, 0.5, 0.25], tail: Some(Box::new(RateExpr::power(2.5, 1.0))) };
    let phi = RateFn::from_parts(step, Role::Scale, Certificate::default(), 1000).unwrap();
    let k = weight_from_scale(&phi).unwrap();
    assert!((1..100).all(|n| k.eval(n) > 0.0));
    assert!(matches!(k.certificate().closed_tail_sum, Some(RateExpr::PlusDyadic { .. })));
}

#[test]
fn product_certificate() {
    let p = rate_product(&inv(1.0), &inv_log()).unwrap();
    let a = p.asymptote().unwrap();
    assert_eq!((a.power, a.log_power), (1.0, 1.0));
    let sq = rate_product(&inv(1.0), &inv(1.0)).unwrap();
    assert_eq!(equivalent(&sq, &inv(2.0)), Relation::Equivalent);
    let s = scaled(&inv(1.0), 3.0).unwrap();
    assert_eq!(equivalent(&s, &inv(1.0)), Relation::Equivalent);
}

#[test]
fn xi_of_inverse_root() {
    let r = xi_stretch(&inv(0.5), 1, 2000).unwrap();
    for e in &r.entries {
        assert_eq!(e.xi, Some(e.n));
        assert!((e.product - 1.0).abs() <= 4.0 * f64::EPSILON);
    }
    assert_eq!(r.threshold, Some(1));
    assert!(r.nondecreasing);
}

#[test]
fn xi_of_log_over_n() {
    let r = xi_stretch(&one_plus_log_over_n(), 1, 40).unwrap();
    for e in &r.entries {
        let target = libm::exp(e.n as f64 - 1.0) / e.n as f64;
        match e.xi {
            Some(x) if target < 1e15 => {
                // ⌈e^{n−1}/n⌉; the predicate's rounding slack moves the
                // threshold by about n·8ε relative.
                let c = libm::ceil(target);
                let slack = c * e.n as f64 * 8.0 * f64::EPSILON + 1.0;
                assert!((x as f64 - c).abs() <= slack, "n={} xi={x} ceil={c}", e.n);
            }
            _ => assert!(rel(e.ln_xi, libm::log(target)) < 1e-9),
        }
        assert!(e.in_sandwich);
    }
}

#[test]
fn xi_rejects_constant() {
    let c = RateFn::from_parts(RateExpr::power(1.0, 0.0), Role::Scale, Certificate::default(), 100);
    assert!(c.is_err());
    // n·φ(n) bounded: rejected by the certificate test.
    assert!(xi_stretch(&inv(1.0), 1, 10).is_err());
}

#[test]
fn separating_profile_conditions() {
    let k = weight(RateExpr::power(1.0, 2.0));
    let p = separating_profile(&k, 3).unwrap();
    let mut running = 0.0;
    let mut prev_h = 0.0;
    for (i, b) in p.blocks.iter().enumerate() {
        let kf = (i + 1) as f64;
        running += b.block_sum;
        assert!(running > kf, "(ii) at block {}", i + 1);
        assert!(b.h_phi_end <= 1.0 / kf * (1.0 + 1e-12), "(iii)");
        assert!(b.h_end >= kf * (1.0 - 1e-12), "(iv)");
        // h nondecreasing, across the boundary included.
        for n in b.start..=b.end.min(b.start + 2000) {
            let h = p.h(n);
            assert!(h >= prev_h * (1.0 - 1e-12));
            prev_h = h;
        }
        prev_h = p.h(b.end);
        assert!(p.h(b.end + 1) >= prev_h * (1.0 - 1e-12));
    }
    assert!(p.h(p.last_end()) >= 3.0);
}

#[test]
fn separating_profile_for_geometric_weight() {
    let k = weight(RateExpr::exponential(1.0, 0.5));
    let p = separating_profile(&k, 3).unwrap();
    assert_eq!(p.blocks.len(), 3);
    assert!(p.blocks.iter().map(|b| b.block_sum).sum::<f64>() > 3.0);
}

#[test]
fn gauge_examples() {
    let g = Gauge::power(0.5).unwrap();
    assert_eq!(gauge_integrability(&g, 1.0).status, ConvergenceStatus::Converges);
    let g = Gauge::log(1.0).unwrap();
    assert_eq!(gauge_integrability(&g, 1.0).status, ConvergenceStatus::Diverges);
    let g = Gauge::double_log(1.0, 1.0).unwrap();
    let v = gauge_integrability(&g, 1.0);
    assert_eq!(v.status, ConvergenceStatus::Converges);
    // Constant on u ≤ 2, then ∫_2^U du/(u (ln u)²) = 1/ln 2 − 1/ln U.
    let ln2 = libm::log(2.0);
    let head = 2.0 / (2.0 * ln2 * ln2);
    let expected = head + 1.0 / ln2 - 1.0 / (INTEGRABILITY_LEVELS as f64 * ln2);
    assert!((v.partial_sum - expected).abs() < 1e-3 * expected, "{}", v.partial_sum);
    assert!(Gauge::log(1.0).unwrap().check_on_grid(1000, 0.2).is_ok());
    assert!(Gauge::power(2.0).unwrap().check_on_grid(1000, 0.01).is_ok());
}

#[test]
fn gauge_forms() {
    let g = Gauge::log(1.0).unwrap();
    assert_eq!(g.eval(0.0), 0.0);
    assert_eq!(g.eval(0.5), 1.0);
    assert!((g.eval(libm::exp(-4.0)) - 0.25).abs() < 1e-15);
    let k = g.psi_k(1.0);
    assert!((k.eval(libm::exp(-4.0)) - libm::exp(-4.0) * 0.25).abs() < 1e-15);
    let t = Gauge::tabulated(vec![0.5, 1.0], vec![1.0, 1.5]).unwrap();
    assert_eq!(t.eval(0.25), 0.5);
    assert_eq!(t.eval(0.75), 1.25);
    assert_eq!(t.eval(3.0), 1.5);
}

#[test]
fn sample_points_cover_horizon() {
    let s = sample_points(1_000_000);
    assert_eq!(s[0], 1);
    assert_eq!(*s.last().unwrap(), 1_000_000);
    assert!(s.windows(2).all(|w| w[0] < w[1]));
}

fn power_log_scale() -> impl Strategy<Value = RateFn> {
    (0.5f64..4.0, 0.1f64..3.0, -2.0f64..2.0).prop_map(|(c, p, l)| {
        // log factor (1 + ln(n + 1))^{-l} keeps everything positive and smooth
        let cf = ClosedForm { coef: c, power: p, log_power: l, log_shift: 1.0, log_arg_shift: 1.0, ..ClosedForm::default() };
        RateFn::from_parts(RateExpr::closed(cf), Role::Scale, Certificate::default(), 20_000)
            .or_else(|_| RateFn::from_parts(RateExpr::power(c, p), Role::Scale, Certificate::default(), 20_000))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sigma_round_trips_weight_from_scale(phi in power_log_scale()) {
        let k = weight_from_scale(&phi).unwrap();
        let s = sigma(&k).unwrap();
        for n in [1u64, 2, 3, 10, 100, 1000, 19_999] {
            prop_assert!(rel(s.eval(n), phi.eval(n)) < 1e-12);
        }
    }

    #[test]
    fn sigma_output_is_nonincreasing(p in 1.2f64..4.0, l in -1.0f64..2.0) {
        let cf = ClosedForm { power: p, log_power: l, log_shift: 1.0, log_arg_shift: 1.0, ..ClosedForm::default() };
        let k = RateFn::from_parts(RateExpr::closed(cf), Role::Weight, Certificate::default(), 5000).unwrap();
        let s = sigma(&k).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=6000 {
            let v = s.eval(n);
            prop_assert!(v > 0.0 && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn equivalence_is_an_equivalence(a in power_log_scale(), b in power_log_scale(), c in power_log_scale()) {
        prop_assert_eq!(equivalent(&a, &a), Relation::Equivalent);
        let ab = equivalent(&a, &b);
        let ba = equivalent(&b, &a);
        let flipped = match ab {
            Relation::StrictlySmaller => Relation::StrictlyLarger,
            Relation::StrictlyLarger => Relation::StrictlySmaller,
            r => r,
        };
        prop_assert_eq!(ba, flipped);
        if ab == Relation::Equivalent && equivalent(&b, &c) == Relation::Equivalent {
            prop_assert_eq!(equivalent(&a, &c), Relation::Equivalent);
        }
    }

    #[test]
    fn lattice_laws(a in power_log_scale(), b in power_log_scale(), c in power_log_scale()) {
        let j = |x: &RateFn, y: &RateFn| lattice_join(x, y).unwrap();
        let m = |x: &RateFn, y: &RateFn| lattice_meet(x, y).unwrap();
        let checks = [
            (j(&a, &b), j(&b, &a)),
            (m(&a, &b), m(&b, &a)),
            (j(&j(&a, &b), &c), j(&a, &j(&b, &c))),
            (m(&m(&a, &b), &c), m(&a, &m(&b, &c))),
            (j(&a, &a), a.clone()),
            (m(&a, &a), a.clone()),
            (m(&a, &j(&a, &b)), a.clone()),
            (j(&a, &m(&a, &b)), a.clone()),
        ];
        for (l, r) in &checks {
            for n in sample_points(20_000) {
                prop_assert_eq!(l.eval(n), r.eval(n));
            }
        }
    }

    #[test]
    fn product_certificates_compose(p1 in 0.1f64..3.0, l1 in -2.0f64..2.0, p2 in 0.1f64..3.0, l2 in -2.0f64..2.0) {
        let mk = |p: f64, l: f64| {
            let cf = ClosedForm { power: p, log_power: l, log_shift: 1.0, log_arg_shift: 1.0, ..ClosedForm::default() };
            RateFn::from_parts(RateExpr::closed(cf), Role::Scale, Certificate::default(), 20_000)
        };
        let (Ok(a), Ok(b)) = (mk(p1, l1), mk(p2, l2)) else { return Ok(()) };
        let prod = rate_product(&a, &b).unwrap();
        let c = prod.asymptote().unwrap();
        prop_assert!((c.power - (p1 + p2)).abs() < 1e-12);
        prop_assert!((c.log_power - (l1 + l2)).abs() < 1e-12);
    }

    #[test]
    fn family_lower_bound_is_below_members(ps in proptest::collection::vec(0.2f64..3.0, 1..6)) {
        let list: Vec<RateFn> = ps.iter().map(|p| inv(*p)).collect();
        let lb = family_lower_bound(&list).unwrap();
        for n in 1..300u64 {
            for (i, f) in list.iter().enumerate() {
                if (i as u64) < n {
                    prop_assert!(lb.eval(n) <= f.eval(n));
                }
            }
        }
    }

    #[test]
    fn xi_sandwich_on_powers(p in 0.05f64..0.95) {
        let phi = inv(p);
        let r = xi_stretch(&phi, 1, 300).unwrap();
        prop_assert!(r.nondecreasing);
        let t = r.threshold.unwrap();
        for e in r.entries.iter().filter(|e| e.n >= t) {
            prop_assert!(e.product >= 1.0 - 1e-12 && e.product <= 2.0 + 1e-12);
        }
    }
}
