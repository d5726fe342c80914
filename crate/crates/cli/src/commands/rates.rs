use bernstein_core::rates::{
    compare, equivalent, gauge_integrability, lattice_join, lattice_meet, phi_kappa_member, sigma, xi_stretch,
    ConvergenceStatus, RateFn, Relation, Role,
};
use serde_json::{json, Value};

use super::rate;
use crate::artifact::{Artifact, Plot, Series, Table};
use crate::cli::{LatticeOp, RatesCmd, RoleArg};
use crate::error::{CliError, FlagContext};
use crate::grammar::parse_gauge;
use crate::Ctx;

fn role(r: RoleArg) -> Role {
    match r {
        RoleArg::Scale => Role::Scale,
        RoleArg::Weight => Role::Weight,
    }
}

fn loglog(title: &str, series: Vec<Series>) -> Plot {
    Plot { title: title.into(), x_label: "n".into(), y_label: "value".into(), log_x: true, log_y: true, series }
}

fn tabulate(f: &RateFn, n_max: u64) -> Vec<(f64, f64)> {
    (1..=n_max).map(|n| (n as f64, f.eval(n))).collect()
}

pub fn run(cmd: &RatesCmd, ctx: &Ctx) -> Result<Artifact, CliError> {
    match cmd {
        RatesCmd::Eval(a) => {
            let f = rate("rate", &a.rate, role(a.role), ctx)?;
            let n_max = a.n_max.min(ctx.horizon);
            let mut t = Table::new(&["n", "value"]);
            let pts = tabulate(&f, n_max);
            pts.iter().for_each(|&(n, v)| t.push(vec![json!(n as u64), json!(v)]));
            let result = json!({ "rate": f, "asymptote": f.asymptote(), "values": pts.iter().map(|p| p.1).collect::<Vec<_>>() });
            Ok(Artifact::new("rates eval", a, &result)?
                .with_table(t)
                .with_plot(loglog(&a.rate, vec![Series { name: a.rate.clone(), points: pts }])))
        }
        RatesCmd::Compare(a) => {
            let (f, g) = (rate("a", &a.a, role(a.role), ctx)?, rate("b", &a.b, role(a.role), ctx)?);
            let c = compare(&f, &g);
            let eq = equivalent(&f, &g);
            let mut art = Artifact::new("rates compare", a, &json!({ "comparison": c, "equivalent": eq }))?;
            art.inconclusive = c.relation == Relation::Inconclusive;
            Ok(art)
        }
        RatesCmd::Lattice(a) => {
            let (f, g) = (rate("a", &a.a, role(a.role), ctx)?, rate("b", &a.b, role(a.role), ctx)?);
            let h = match a.op {
                LatticeOp::Join => lattice_join(&f, &g),
                LatticeOp::Meet => lattice_meet(&f, &g),
            }
            .flag("op")?;
            let mut t = Table::new(&["n", "a", "b", "value"]);
            for n in 1..=a.n_max.min(ctx.horizon) {
                t.push(vec![json!(n), json!(f.eval(n)), json!(g.eval(n)), json!(h.eval(n))]);
            }
            Ok(Artifact::new("rates lattice", a, &json!({ "rate": h, "asymptote": h.asymptote() }))?.with_table(t))
        }
        RatesCmd::Sigma(a) => {
            let k = rate("kappa", &a.kappa, Role::Weight, ctx)?;
            let s = sigma(&k).flag("kappa")?;
            let mut t = Table::new(&["n", "kappa", "sigma"]);
            for n in 1..=a.n_max.min(ctx.horizon) {
                t.push(vec![json!(n), json!(k.eval(n)), json!(s.eval(n))]);
            }
            let result = json!({ "sigma": s, "sigma_1": s.eval(1), "asymptote": s.asymptote() });
            let plot = loglog("Σ(κ)", vec![
                Series { name: "κ".into(), points: tabulate(&k, a.n_max.min(ctx.horizon)) },
                Series { name: "Σ(κ)".into(), points: tabulate(&s, a.n_max.min(ctx.horizon)) },
            ]);
            Ok(Artifact::new("rates sigma", a, &result)?.with_table(t).with_plot(plot))
        }
        RatesCmd::Xi(a) => {
            let phi = rate("phi", &a.phi, Role::Scale, ctx)?;
            if a.from < 1 || a.to < a.from {
                return Err(CliError::flag("to", "need 1 ≤ from ≤ to"));
            }
            let r = xi_stretch(&phi, a.from, a.to).flag("phi")?;
            let mut t = Table::new(&["n", "xi", "ln_xi", "product", "in_sandwich"]);
            for e in &r.entries {
                t.push(vec![json!(e.n), json!(e.xi), json!(e.ln_xi), json!(e.product), json!(e.in_sandwich)]);
            }
            let points = r.entries.iter().map(|e| (e.n as f64, e.product)).collect();
            let plot = Plot {
                title: format!("ξ(n)·φ(n·ξ(n)) for {}", a.phi),
                x_label: "n".into(),
                y_label: "product".into(),
                log_x: true,
                log_y: false,
                series: vec![Series { name: "product".into(), points }],
            };
            Ok(Artifact::new("rates xi", a, &r)?.with_table(t).with_plot(plot))
        }
        RatesCmd::Gauge(a) => {
            let psi = parse_gauge(&a.psi).flag("psi")?;
            let v = gauge_integrability(&psi, a.s);
            let mut art = Artifact::new("rates gauge", a, &json!({ "gauge": psi, "verdict": v }))?;
            art.inconclusive = v.status == ConvergenceStatus::InconclusiveAtHorizon;
            Ok(art)
        }
        RatesCmd::Member(a) => {
            let k = rate("kappa", &a.kappa, Role::Weight, ctx)?;
            let phi = rate("phi", &a.phi, Role::Scale, ctx)?;
            let v = phi_kappa_member(&k, &phi);
            let mut art = Artifact::new("rates member", a, &json!({ "verdict": v, "member": member(&v.status) }))?;
            art.inconclusive = v.status == ConvergenceStatus::InconclusiveAtHorizon;
            Ok(art)
        }
    }
}

fn member(s: &ConvergenceStatus) -> Value {
    match s {
        ConvergenceStatus::Converges => json!(true),
        ConvergenceStatus::Diverges => json!(false),
        ConvergenceStatus::InconclusiveAtHorizon => Value::Null,
    }
}
