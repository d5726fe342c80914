//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero when any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bernstein_core::classes::{
    first_class_verdict, markushevich_split, second_class_verdict, split_identity_holds, ClassConfig, SplitConfig,
};
use bernstein_core::error_seq::{
    beurling_witness, errors_from_wiener, realize_bernstein, separation_witness, ErrorSeq, Provenance, TailRule,
};
use bernstein_core::geometry::{box_dimension_profile, coarea_check, thm215_cover};
use bernstein_core::minimax::{
    bernstein_nondiff, bernstein_nondiff_sampled, best_uniform_approx, circle_grid, markov_constant, uniform_grid,
    Basis, Domain, SampledFn, Subset,
};
use bernstein_core::rates::{
    equivalent, gauge_integrability, lattice_join, lattice_meet, sample_points, sigma, xi_stretch, ClosedForm,
    ConvergenceStatus, Gauge, RateExpr, RateFn, Relation,
};
use bernstein_core::wiener::{wiener_en, TargetNorm, WienerElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn scale(expr: RateExpr) -> RateFn {
    RateFn::scale(expr).unwrap()
}

fn power_log(coef: f64, power: f64, log_power: f64) -> RateExpr {
    RateExpr::closed(ClosedForm { coef, power, log_power, log_shift: 1.0, log_arg_shift: 1.0, ..ClosedForm::default() })
}

/// Dyadic targets: round trip through the realization is bit-exact.
fn c1_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let unit = libm::ldexp(1.0, -20);
    for t in 0..100 {
        let len = rng.gen_range(1..=60usize);
        let mut k: u64 = rng.gen_range(1..=1 << 20);
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(k as f64 * unit);
            k -= rng.gen_range(0..=k / 3);
        }
        let r = rng.gen_range(1..=3);
        let ratio = libm::ldexp(1.0, -r);
        let c = ErrorSeq::from_values(values.clone(), Some(TailRule::Geometric { ratio }), Provenance::Constructed)
            .map_err(|e| format!("instance {t}: {e}"))?;
        let f = realize_bernstein(&c).map_err(|e| format!("instance {t}: {e}"))?;
        let e = errors_from_wiener(&f, 1000).map_err(|e| format!("instance {t}: {e}"))?;
        // oracle: k_L · 2^{−20 − r(n−L)}, rounded once
        for n in 1..=1000u64 {
            let want = if n as usize <= len {
                values[n as usize - 1]
            } else {
                libm::ldexp(values[len - 1] * (1 << 20) as f64, -20 - r * (n as i32 - len as i32))
            };
            let got = e.get(n);
            ensure(got.to_bits() == want.to_bits(), || format!("instance {t}, n = {n}: {got:e} vs {want:e}"))?;
            ensure(c.get(n).to_bits() == want.to_bits(), || format!("instance {t}, n = {n}: target rule disagrees"))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok("100 instances, n <= 1000, bitwise".into())
}

fn norm_of(kind: TargetNorm, v: &[f64]) -> f64 {
    match kind {
        TargetNorm::L1 => v.iter().map(|x| x.abs()).sum(),
        TargetNorm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        TargetNorm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

/// `‖f − h‖` in the Wiener norm, computed from the raw coefficient maps.
fn distance(kind: TargetNorm, f: &[(i64, Vec<f64>)], h: &[(i64, Vec<f64>)], dim: usize) -> f64 {
    let freqs: BTreeSet<i64> = f.iter().chain(h).map(|(n, _)| *n).collect();
    let coef = |s: &[(i64, Vec<f64>)], n: i64| s.iter().find(|(m, _)| *m == n).map_or(vec![0.0; dim], |(_, v)| v.clone());
    freqs
        .iter()
        .map(|&n| {
            let d: Vec<f64> = coef(f, n).iter().zip(coef(h, n)).map(|(a, b)| a - b).collect();
            norm_of(kind, &d)
        })
        .sum()
}

/// No random candidate of degree `i` beats the truncation.
fn c2_best_approximation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_gap = 0.0f64;
    for t in 0..100 {
        let dim = rng.gen_range(1..=3usize);
        let kind = [TargetNorm::L1, TargetNorm::L2, TargetNorm::Linf][t % 3];
        let support = rng.gen_range(1..=12);
        let mut coeffs: Vec<(i64, Vec<f64>)> = Vec::new();
        for _ in 0..support {
            let n = rng.gen_range(-20..=20i64);
            if coeffs.iter().all(|(m, _)| *m != n) {
                coeffs.push((n, (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()));
            }
        }
        let f = WienerElement::from_coefficients(kind, coeffs.clone()).map_err(|e| e.to_string())?;
        let i = rng.gen_range(0..=22u64);
        let en = wiener_en(&f, i).map_err(|e| e.to_string())?;
        let trunc: Vec<(i64, Vec<f64>)> = coeffs.iter().filter(|(n, _)| n.unsigned_abs() <= i).cloned().collect();
        let d_trunc = distance(kind, &coeffs, &trunc, dim);
        let tol = 1e-12 * (1.0 + distance(kind, &coeffs, &[], dim));
        ensure((d_trunc - en).abs() <= tol, || format!("instance {t}: truncation {d_trunc} vs E_{i} = {en}"))?;
        for c in 0..1000 {
            // perturbations of the truncation at several sizes, plus free candidates
            let size = [1.0, 1e-3, 1e-8, 0.0][c % 4];
            let width = i as i64;
            let terms = rng.gen_range(1..=(2 * width as usize + 1).min(8));
            let mut h = trunc.clone();
            for _ in 0..terms {
                let n = rng.gen_range(-width..=width);
                let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0) * if size == 0.0 { 2.0 } else { size }).collect();
                match h.iter_mut().find(|(m, _)| *m == n) {
                    Some((_, w)) if size != 0.0 => w.iter_mut().zip(&v).for_each(|(a, b)| *a += b),
                    Some((_, w)) => *w = v,
                    None => h.push((n, v)),
                }
            }
            let d = distance(kind, &coeffs, &h, dim);
            worst_gap = worst_gap.max(en - d);
            ensure(d >= en - tol, || format!("instance {t}: candidate at distance {d} beats E_{i} = {en}"))?;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("100 elements x 1000 candidates, worst margin {worst_gap:.1e}"))
}

fn c3_sigma() -> Outcome {
    let k = RateFn::weight(RateExpr::power(1.0, 2.0)).map_err(|e| e.to_string())?;
    let s = sigma(&k).map_err(|e| e.to_string())?;
    let v = s.eval(1);
    let target = PI * PI / 6.0;
    ensure((v - target).abs() <= 1e-6, || format!("Σ(1/n²)(1) = {v}, want {target}"))?;
    let rel = equivalent(&s, &scale(RateExpr::power(1.0, 1.0)));
    ensure(rel == Relation::Equivalent, || format!("Σ(1/n²) vs 1/n: {rel:?}"))?;
    Ok(format!("Σ(1)(1) = {v:.9}, equivalent to 1/n"))
}

fn c4_witnesses() -> Outcome {
    let start = Instant::now();
    let phi = scale(RateExpr::power(1.0, 1.0));
    let phi_p = scale(RateExpr::power(1.0, 0.5));
    let e = separation_witness(&phi, &phi_p, None).map_err(|e| e.to_string())?;
    let inv_e = (-1.0f64).exp();
    for i in 0..10u32 {
        let n = 4u64.pow(i);
        // E_n = exp(−√n) at the block starts
        let want = (-(n as f64).sqrt()).exp();
        let got = e.get(n);
        ensure((got - want).abs() <= 1e-12 * want, || format!("E_{n} = {got:e}, want {want:e}"))?;
        let m = (-e.neg_ln(n) * (n as f64).powf(-0.5)).exp();
        ensure((m - inv_e).abs() <= 1e-14, || format!("margin at {n}: {m}"))?;
    }
    let cfg = ClassConfig { rho: 0.5, witnesses: 3, horizon: 1 << 20 };
    let v = second_class_verdict(&e, &phi_p, &cfg);
    let x = v.exact.as_ref().ok_or("no exact verdict for φ′")?;
    ensure(x.member, || format!("not a member for φ′: {}", x.reason))?;
    let liminf = x.liminf.ok_or("no liminf")?;
    ensure((liminf - inv_e).abs() <= 1e-15, || format!("liminf {liminf}"))?;
    let v = second_class_verdict(&e, &phi, &cfg);
    ensure(v.is_member() == Some(false), || format!("membership for φ not refuted: {:?}", v.status))?;

    let k = RateFn::weight(RateExpr::power(1.0, 2.0)).map_err(|e| e.to_string())?;
    let e = beurling_witness(&k, 3).map_err(|e| e.to_string())?;
    let Some(TailRule::Profile(p)) = e.tail() else {
        return Err("witness carries no profile".into());
    };
    let n3 = p.blocks[2].end;
    let mut s = 0.0;
    for n in 1..=n3 {
        s -= e.neg_ln(n) / (n * n) as f64;
    }
    ensure(s < -3.0, || format!("Σ κ ln E_n up to {n3} = {s}"))?;
    // Σ_{n ≥ N} 1/n² by Euler–Maclaurin
    let x = n3 as f64;
    let tail_k = 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x) - 1.0 / (30.0 * x.powi(5));
    let top = (-e.neg_ln(n3) * tail_k).exp();
    ensure(top >= (-1.0f64 / 3.0).exp(), || format!("(E_N)^Σκ(N) = {top} at N = {n3}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("margin e^-1 at 4^i; N_3 = {n3}, partial sum {s:.4}, (E_N)^Σκ = {top:.4}"))
}

fn c5_lattice_and_union() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = sample_points(20_000);
    let mut violations = Vec::new();
    let scale_fn = |rng: &mut ChaCha8Rng| {
        let p = rng.gen_range(1..=20) as f64 / 10.0;
        let q = rng.gen_range(0..=2) as f64;
        let c = rng.gen_range(1..=4) as f64 / 4.0;
        RateFn::scale(power_log(c, p, q)).unwrap().with_horizon(20_000).unwrap()
    };
    let weight_fn = |rng: &mut ChaCha8Rng| {
        let p = rng.gen_range(11..=30) as f64 / 10.0;
        let q = rng.gen_range(-1..=2) as f64;
        let c = rng.gen_range(1..=4) as f64 / 4.0;
        RateFn::weight(power_log(c, p, q)).unwrap()
    };
    let same = |x: &RateFn, y: &RateFn| pts.iter().all(|&n| x.eval(n) == y.eval(n));
    let cfg = ClassConfig { horizon: 2_000, ..ClassConfig::default() };
    for t in 0..200 {
        let (a, b, c) = (scale_fn(&mut rng), scale_fn(&mut rng), scale_fn(&mut rng));
        let j = |x: &RateFn, y: &RateFn| lattice_join(x, y).unwrap();
        let m = |x: &RateFn, y: &RateFn| lattice_meet(x, y).unwrap();
        let laws = [
            ("join commutes", same(&j(&a, &b), &j(&b, &a))),
            ("meet commutes", same(&m(&a, &b), &m(&b, &a))),
            ("join associates", same(&j(&j(&a, &b), &c), &j(&a, &j(&b, &c)))),
            ("meet associates", same(&m(&m(&a, &b), &c), &m(&a, &m(&b, &c)))),
            ("absorption", same(&j(&a, &m(&a, &b)), &a) && same(&m(&a, &j(&a, &b)), &a)),
            ("idempotence", same(&j(&a, &a), &a) && same(&m(&a, &a), &a)),
        ];
        violations.extend(laws.iter().filter(|(_, ok)| !ok).map(|(name, _)| format!("{t}: {name}")));

        let e = match t % 3 {
            0 => ErrorSeq::exp_neg_inv(&scale_fn(&mut rng)).unwrap(),
            1 => ErrorSeq::from_rule(
                TailRule::Power { coef: 1.0, power: rng.gen_range(1..=8) as f64 / 2.0 },
                Provenance::Constructed,
            )
            .unwrap(),
            _ => ErrorSeq::from_rule(
                TailRule::Geometric { ratio: rng.gen_range(1..=9) as f64 / 10.0 },
                Provenance::Constructed,
            )
            .unwrap(),
        };
        let (k1, k2) = (weight_fn(&mut rng), weight_fn(&mut rng));
        let join = RateExpr::Join { left: Box::new(k1.expr().clone()), right: Box::new(k2.expr().clone()) };
        let k = RateFn::weight(join).unwrap();
        let member = |k: &RateFn| first_class_verdict(&e, k, &cfg).is_member();
        match (member(&k), member(&k1), member(&k2)) {
            (Some(u), Some(x), Some(y)) if u == (x || y) => {}
            other => violations.push(format!("{t}: union law {other:?}")),
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok("200 instances, 0 violations".into())
}

fn c6_markov() -> Outcome {
    for n in 1..=32 {
        let b = markov_constant(Basis::Trig, n, Subset::Full).map_err(|e| e.to_string())?;
        ensure(b.upper == n as f64, || format!("trig n = {n}: upper {}", b.upper))?;
    }
    let mut worst = 0.0f64;
    for n in 1..=16 {
        let b = markov_constant(Basis::Chebyshev, n, Subset::Full).map_err(|e| e.to_string())?;
        let n2 = (n * n) as f64;
        ensure(b.lower <= n2 && n2 <= b.upper, || format!("Chebyshev n = {n}: [{}, {}]", b.lower, b.upper))?;
        ensure(b.gap() <= 0.02, || format!("Chebyshev n = {n}: gap {}", b.gap()))?;
        worst = worst.max(b.gap());
    }
    Ok(format!("trig exact to 32, Chebyshev max gap {worst:.2e} to 16"))
}

fn c7_graph() -> Outcome {
    let start = Instant::now();
    let g = bernstein_nondiff_sampled(1 << 18, 4).map_err(|e| e.to_string())?;
    let exps: Vec<i32> = (4..=12).collect();
    let r = box_dimension_profile(&g, &exps).map_err(|e| e.to_string())?;
    ensure((0.95..=1.15).contains(&r.slope), || format!("box slope {}", r.slope))?;

    let f = SampledFn::from_fn(Domain::Circle, circle_grid(6000), "bernstein_nondiff(cos t)", |t| {
        bernstein_nondiff(t.cos(), 4).unwrap().value
    })
    .map_err(|e| e.to_string())?;
    let psi = Gauge::log(1.0).map_err(|e| e.to_string())?;
    let mut sums = Vec::new();
    for n in [8, 16, 32] {
        let a = best_uniform_approx(&f, n, Basis::Trig).map_err(|e| e.to_string())?;
        let c = thm215_cover(&f, &a, n as f64, a.error, &psi, 1.0).map_err(|e| format!("n = {n}: {e}"))?;
        ensure(c.verified(), || format!("n = {n}: sum {} bound {}", c.psi_k_sum, c.bound))?;
        sums.push(format!("{n}: {:.3}/{:.1}", c.psi_k_sum, c.bound));
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("slope {:.4}; covers {}", r.slope, sums.join(", ")))
}

fn c8_gauges() -> Outcome {
    let mut cases = vec![];
    for alpha in [0.1, 0.5, 1.0, 2.0] {
        cases.push((format!("t^{alpha}"), Gauge::power(alpha), ConvergenceStatus::Converges));
    }
    cases.push(("log".into(), Gauge::log(1.0), ConvergenceStatus::Diverges));
    cases.push(("double-log".into(), Gauge::double_log(1.0, 1.0), ConvergenceStatus::Converges));
    for (name, g, want) in cases {
        let g = g.map_err(|e| e.to_string())?;
        let v = gauge_integrability(&g, 1.0);
        ensure(v.status == want, || format!("{name}: {:?}, want {want:?}", v.status))?;
    }
    Ok("t^a converges, log diverges, double-log converges".into())
}

fn c9_xi() -> Outcome {
    let sqrt = scale(RateExpr::power(1.0, 0.5));
    let loglin = scale(RateExpr::closed(ClosedForm { power: 1.0, log_power: -1.0, log_shift: 1.0, ..ClosedForm::default() }));
    ensure((loglin.eval(7) - (1.0 + 7f64.ln()) / 7.0).abs() < 1e-15, || "(1 + ln n)/n misbuilt".into())?;
    let mut notes = Vec::new();
    for (name, phi) in [("n^-1/2", &sqrt), ("(1+ln n)/n", &loglin)] {
        let r = xi_stretch(phi, 1, 10_000).map_err(|e| e.to_string())?;
        let t0 = r.threshold.ok_or_else(|| format!("{name}: no threshold"))?;
        for x in r.entries.iter().filter(|x| x.n >= t0) {
            // the library's sandwich tolerance absorbs rounding in ξ·φ(nξ)
            let ok = x.product >= 1.0 - 1e-12 && x.product <= 2.0 + 1e-12;
            ensure(x.in_sandwich && ok, || format!("{name}, n = {}: {x:?}", x.n))?;
        }
        for x in &r.entries {
            let n = x.n as f64;
            if name == "n^-1/2" {
                ensure(x.xi == Some(x.n), || format!("ξ({}) = {:?}", x.n, x.xi))?;
                ensure((x.product - 1.0).abs() <= 1e-12, || format!("product at {}: {}", x.n, x.product))?;
            } else {
                // ξ = ⌈e^{n−1}/n⌉, so ln ξ lies between b and ln(e^b + 1)
                let b = n - 1.0 - n.ln();
                let hi = b.max(0.0) + (-b.abs()).exp().ln_1p();
                let tol = 1e-9 * b.abs().max(1.0);
                ensure(x.ln_xi >= b - tol && x.ln_xi <= hi + tol, || format!("ln ξ({}) = {}, want [{b}, {hi}]", x.n, x.ln_xi))?;
                let product = (1.0 + n.ln() + x.ln_xi) / n;
                ensure((product - x.product).abs() <= 1e-9, || format!("product at {}: {} vs {product}", x.n, x.product))?;
            }
        }
        notes.push(format!("{name} from {t0}"));
    }
    Ok(notes.join(", "))
}

fn c10_split() -> Outcome {
    let c = ErrorSeq::from_rule(TailRule::Geometric { ratio: 0.5 }, Provenance::Constructed).map_err(|e| e.to_string())?;
    let f = realize_bernstein(&c).map_err(|e| e.to_string())?;
    let phi = scale(RateExpr::power(1.0, 1.0));
    let r = markushevich_split(&f, &phi, &SplitConfig { rho: 0.5, ..SplitConfig::default() }).map_err(|e| e.to_string())?;
    let cutoff = r.edges.last().copied().unwrap_or(0) + 100;
    for n in -(cutoff as i64)..=cutoff as i64 {
        let (a, b, want) = (r.f1.coefficient(n), r.f2.coefficient(n), f.coefficient(n));
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        ensure(sum == want, || format!("coefficient {n}: {sum:?} vs {want:?}"))?;
    }
    ensure(split_identity_holds(&f, &r.f1, &r.f2, cutoff), || "split identity fails".into())?;
    let mut ok = [0usize; 2];
    for b in &r.boundaries {
        let part = if b.part == 1 { &r.f1 } else { &r.f2 };
        let e = wiener_en(part, b.n).map_err(|e| e.to_string())?;
        // ρ^{1/φ(n)} = 2^{−n}
        if b.holds && e.ln() <= -(b.n as f64) * 2f64.ln() * (1.0 + 1e-12) {
            ok[b.part as usize - 1] += 1;
        }
    }
    ensure(r.verified(1) >= 10 && r.verified(2) >= 10, || format!("verified {} and {}", r.verified(1), r.verified(2)))?;
    ensure(ok[0] >= 10 && ok[1] >= 10, || format!("independently verified {ok:?}"))?;
    Ok(format!("{} and {} boundaries per part", ok[0], ok[1]))
}

fn c11_coarea() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let interval = Domain::Interval { a: 0.0, b: 1.0 };
    let mut fns = Vec::new();
    for i in 0..16 {
        let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..8.0), rng.gen_range(-1.0..1.0));
        fns.push(
            SampledFn::from_fn(interval, uniform_grid(2000, 0.0, 1.0), format!("smooth {i}"), move |x: f64| {
                a * (b * x).sin() + c * x * x
            })
            .unwrap(),
        );
    }
    let interval = Domain::Interval { a: -1.0, b: 1.0 };
    let grid = || uniform_grid(2000, -1.0, 1.0);
    fns.push(SampledFn::from_fn(interval, grid(), "abs", f64::abs).unwrap());
    fns.push(SampledFn::from_fn(interval, grid(), "runge", |x| 1.0 / (1.0 + 25.0 * x * x)).unwrap());
    fns.push(SampledFn::from_fn(interval, grid(), "tent", |x| 1.0 - (2.0 * x.abs() - 1.0).abs()).unwrap());
    fns.push(SampledFn::from_fn(interval, grid(), "exp", f64::exp).unwrap());
    let mut worst = 0.0f64;
    for (i, f) in fns.iter().enumerate() {
        let alpha = [0.5, 1.0, 1.5][i % 3];
        let psi = Gauge::power(alpha).map_err(|e| e.to_string())?;
        let r = coarea_check(f, &psi, 1.0, 200).map_err(|e| format!("{}: {e}", f.name))?;
        ensure(r.lipschitz.is_finite(), || format!("{}: no Lipschitz witness", f.name))?;
        ensure(r.ratio <= 1.1, || format!("{}: ratio {}", f.name, r.ratio))?;
        worst = worst.max(r.ratio);
    }
    Ok(format!("{} functions, max ratio {worst:.4}", fns.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("dyadic round trip", c1_round_trip),
        ("truncation is a best approximation", c2_best_approximation),
        ("sigma of 1/n^2", c3_sigma),
        ("separation and Beurling witnesses", c4_witnesses),
        ("lattice and union laws", c5_lattice_and_union),
        ("Markov constants", c6_markov),
        ("box dimension and tube covers", c7_graph),
        ("gauge integrability", c8_gauges),
        ("xi sandwich", c9_xi),
        ("split", c10_split),
        ("coarea envelope", c11_coarea),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({t:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({t:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
