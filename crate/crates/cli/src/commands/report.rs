use bernstein_core::error_seq::realize_bernstein;
use bernstein_core::geometry::box_dimension_profile;
use bernstein_core::minimax::{bernstein_nondiff_sampled, markov_constant, Basis, Subset};
use bernstein_core::rates::{equivalent, gauge_integrability, sigma, xi_stretch, ConvergenceStatus, Gauge, Relation, Role};
use bernstein_core::wiener::wiener_en;
use serde::Serialize;
use serde_json::json;

use super::construct::target_errors;
use super::rate;
use crate::artifact::{Artifact, Table};
use crate::cli::ReportArgs;
use crate::error::CliError;
use crate::Ctx;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: String,
    expected: &'static str,
    pass: bool,
}

pub fn run(a: &ReportArgs, ctx: &Ctx) -> Result<Artifact, CliError> {
    let mut checks = Vec::new();
    let mut push = |name, value: String, expected, pass| checks.push(Check { name, value, expected, pass });

    let k = rate("kappa", "1/n^2", Role::Weight, ctx)?;
    let s = sigma(&k)?;
    let target = std::f64::consts::PI.powi(2) / 6.0;
    push("sigma(1/n^2)(1)", format!("{}", s.eval(1)), "pi^2/6 within 1e-6", (s.eval(1) - target).abs() <= 1e-6);
    let rel = equivalent(&s, &rate("phi", "1/n", Role::Scale, ctx)?);
    push("sigma(1/n^2) ~ 1/n", format!("{rel:?}"), "Equivalent", rel == Relation::Equivalent);

    for (name, gauge, want) in [
        ("gauge power:0.5", Gauge::power(0.5)?, ConvergenceStatus::Converges),
        ("gauge log:1", Gauge::log(1.0)?, ConvergenceStatus::Diverges),
        ("gauge double-log:1,1", Gauge::double_log(1.0, 1.0)?, ConvergenceStatus::Converges),
    ] {
        let v = gauge_integrability(&gauge, 1.0);
        let expected = if want == ConvergenceStatus::Converges { "Converges" } else { "Diverges" };
        push(name, format!("{:?}", v.status), expected, v.status == want);
    }

    let phi = rate("phi", "n^-0.5", Role::Scale, ctx)?;
    let xi = xi_stretch(&phi, 1, 10_000.min(ctx.horizon))?;
    push("xi sandwich n^-0.5", xi.threshold.map_or("none".into(), |n| n.to_string()), "threshold exists", xi.threshold.is_some());

    let trig_ok = (1..=8).all(|n| markov_constant(Basis::Trig, n, Subset::Full).is_ok_and(|b| b.upper == n as f64));
    push("trig Markov = n, n <= 8", format!("{trig_ok}"), "true", trig_ok);
    let mut worst = 0.0f64;
    let mut bracket = true;
    for n in 1..=8 {
        let b = markov_constant(Basis::Chebyshev, n, Subset::Full)?;
        let n2 = (n * n) as f64;
        bracket &= b.lower <= n2 * (1.0 + 1e-9) && n2 <= b.upper * (1.0 + 1e-9);
        worst = worst.max(b.gap());
    }
    push("Chebyshev Markov brackets n^2, n <= 8", format!("max gap {worst:.3e}"), "contains n^2, gap <= 2%", bracket && worst <= 0.02);

    let f = realize_bernstein(&target_errors("1/n")?)?;
    let e5 = wiener_en(&f, 5)?;
    push("E_5 of realize(1/n)", format!("{e5}"), "0.2", e5 == 0.2);

    let g = bernstein_nondiff_sampled(a.points, 4)?;
    let top = ((a.points / 2) as f64).log2().floor() as i32;
    let exps: Vec<i32> = (4..=top.min(12)).collect();
    let r = box_dimension_profile(&g, &exps)?;
    push("box slope of bernstein_nondiff", format!("{:.4}", r.slope), "[0.95, 1.15]", (0.95..=1.15).contains(&r.slope));

    let mut t = Table::new(&["check", "value", "expected", "pass"]);
    for c in &checks {
        t.push(vec![json!(c.name), json!(c.value), json!(c.expected), json!(c.pass)]);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let result = json!({ "passed": passed, "total": checks.len(), "checks": checks });
    Ok(Artifact::new("report", a, &result)?.with_table(t))
}
