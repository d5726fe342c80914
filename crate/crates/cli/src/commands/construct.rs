use bernstein_core::classes::{classify as classify_seq, markushevich_split, split_identity_holds, ClassConfig, ClassSpec, SplitConfig, VerdictStatus};
use bernstein_core::error_seq::{beurling_witness, realize_bernstein, separation_witness, ErrorSeq, Provenance, TailRule};
use bernstein_core::rates::{RateExpr, Role, StepStarts};
use bernstein_core::wiener::WienerElement;
use serde_json::json;

use super::rate;
use crate::artifact::{Artifact, Plot, Series, Table};
use crate::cli::{ClassifyArgs, ConstructCmd, SplitArgs};
use crate::error::{CliError, FlagContext};
use crate::grammar::parse_expr;
use crate::io::{errors_table, load_errors, load_wiener, wiener_meta, wiener_table};
use crate::Ctx;

/// Error sequence for a target with a closed-form tail: powers map to
/// `TailRule::Power`, geometric targets to `TailRule::Geometric`.
pub fn target_errors(s: &str) -> Result<ErrorSeq, CliError> {
    let e = match parse_expr(s).flag("target")? {
        RateExpr::Power { coef, power } => ErrorSeq::from_rule(TailRule::Power { coef, power }, Provenance::Constructed),
        RateExpr::Exponential { coef, ratio } if coef == 1.0 => {
            ErrorSeq::from_rule(TailRule::Geometric { ratio }, Provenance::Constructed)
        }
        RateExpr::Exponential { coef, ratio } => {
            ErrorSeq::from_values(vec![coef * ratio], Some(TailRule::Geometric { ratio }), Provenance::Constructed)
        }
        _ => {
            return Err(CliError::flag(
                "target",
                "only power (c/n^p) and geometric (c·r^n) targets have closed-form tails; pass other sequences with --errors",
            ))
        }
    };
    let e = e.flag("target")?;
    if !e.tends_to_zero() {
        return Err(CliError::flag("target", "target must tend to zero"));
    }
    Ok(e)
}

fn errors_artifact(command: &str, args: &impl serde::Serialize, e: &ErrorSeq, n_max: u64) -> Result<Artifact, CliError> {
    let rows = n_max.max(e.prefix_len());
    let mut a = Artifact::new(command, args, e)?.with_table(errors_table(e, rows));
    if let Some(t) = e.tail() {
        a.csv_meta.push(("tail".into(), serde_json::to_string(t)?));
    }
    let points = e.values(rows).into_iter().enumerate().map(|(i, v)| ((i + 1) as f64, v)).collect();
    Ok(a.with_plot(Plot {
        title: command.into(),
        x_label: "n".into(),
        y_label: "E_n".into(),
        log_x: true,
        log_y: true,
        series: vec![Series { name: "E_n".into(), points }],
    }))
}

pub fn wiener_artifact(command: &str, args: &impl serde::Serialize, f: &WienerElement) -> Result<Artifact, CliError> {
    let mut a = Artifact::new(command, args, f)?.with_table(wiener_table(f));
    a.csv_meta = wiener_meta(f)?;
    Ok(a)
}

pub fn run(cmd: &ConstructCmd, ctx: &Ctx) -> Result<Artifact, CliError> {
    match cmd {
        ConstructCmd::Bernstein(a) => {
            let (e, flag) = match (&a.target, &a.errors) {
                (Some(t), _) => (target_errors(t)?, "target"),
                (None, Some(path)) => (load_errors(path, "errors")?, "errors"),
                (None, None) => unreachable!("clap requires one source"),
            };
            let f = realize_bernstein(&e).flag(flag)?;
            wiener_artifact("construct bernstein", a, &f)
        }
        ConstructCmd::Errors(a) => errors_artifact("construct errors", a, &target_errors(&a.target)?, a.n_max),
        ConstructCmd::Separation(a) => {
            let phi = rate("phi", &a.phi, Role::Scale, ctx)?;
            let phi_prime = rate("phi-prime", &a.phi_prime, Role::Scale, ctx)?;
            let starts = (!a.starts.is_empty()).then(|| StepStarts { explicit: a.starts.clone(), base: 4 });
            let e = separation_witness(&phi, &phi_prime, starts).flag("phi-prime")?;
            errors_artifact("construct separation", a, &e, a.n_max)
        }
        ConstructCmd::Beurling(a) => {
            let k = rate("kappa", &a.kappa, Role::Weight, ctx)?;
            let e = beurling_witness(&k, a.blocks).flag("kappa")?;
            errors_artifact("construct beurling", a, &e, a.n_max)
        }
    }
}

pub fn classify(a: &ClassifyArgs, ctx: &Ctx) -> Result<Artifact, CliError> {
    let e = load_errors(&a.errors, "errors")?;
    let spec = match (&a.scale, &a.weight) {
        (Some(s), _) => ClassSpec::second(rate("scale", s, Role::Scale, ctx)?).flag("scale")?,
        (None, Some(w)) => ClassSpec::first(rate("weight", w, Role::Weight, ctx)?).flag("weight")?,
        (None, None) => unreachable!("clap requires a class"),
    };
    if !(a.rho > 0.0 && a.rho < 1.0) {
        return Err(CliError::flag("rho", "margin must lie in (0, 1)"));
    }
    if a.witnesses == 0 {
        return Err(CliError::flag("witnesses", "need at least one witness"));
    }
    let config = ClassConfig { rho: a.rho, witnesses: a.witnesses, horizon: ctx.horizon };
    let v = classify_seq(&e, &spec, &config);
    let mut art = Artifact::new("classify", a, &json!({ "class": spec, "config": config, "verdict": v }))?;
    art.inconclusive = v.status == VerdictStatus::Inconclusive;
    Ok(art)
}

pub fn split(a: &SplitArgs, ctx: &Ctx) -> Result<Artifact, CliError> {
    let f = match (&a.input, &a.target) {
        (Some(path), _) => load_wiener(path, "in")?,
        (None, Some(t)) => realize_bernstein(&target_errors(t)?).flag("target")?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let phi = rate("phi", &a.phi, Role::Scale, ctx)?;
    if !(a.rho > 0.0 && a.rho < 1.0) {
        return Err(CliError::flag("rho", "margin must lie in (0, 1)"));
    }
    let config = SplitConfig { rho: a.rho, boundaries: a.boundaries, horizon: ctx.horizon };
    let r = markushevich_split(&f, &phi, &config).flag("phi")?;
    let up_to = r.edges.last().copied().unwrap_or(1).saturating_mul(2).min(ctx.horizon);
    let identity = split_identity_holds(&f, &r.f1, &r.f2, up_to);
    let mut t = Table::new(&["n", "part", "error", "ln_bound", "holds"]);
    for b in &r.boundaries {
        t.push(vec![json!(b.n), json!(b.part), json!(b.error), json!(b.ln_bound), json!(b.holds)]);
    }
    let result = json!({
        "config": config,
        "identity_holds": identity,
        "identity_checked_up_to": up_to,
        "verified": [r.verified(1), r.verified(2)],
        "report": r,
    });
    Ok(Artifact::new("split", a, &result)?.with_table(t))
}
