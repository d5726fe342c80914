use bernstein_core::minimax::{
    bernstein_nondiff, best_uniform_approx, chebyshev_lobatto, circle_grid, en_profile, markov_profile, uniform_grid,
    Basis, Domain, SampledFn, Subset,
};
use serde_json::{json, Value};

use crate::artifact::{Artifact, Plot, Series, Table};
use crate::cli::{BasisArg, Builtin, FnSource, MinimaxCmd};
use crate::error::{CliError, FlagContext};
use crate::io::{load_sampled, sampled_meta, sampled_table};
use crate::Ctx;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    /// Chebyshev–Lobatto points on [-1, 1].
    Lobatto,
    /// Equally spaced points on [-1, 1].
    Uniform,
    /// Equally spaced angles, sampling f(cos t).
    Circle,
}

pub fn basis(b: BasisArg) -> Basis {
    match b {
        BasisArg::Chebyshev => Basis::Chebyshev,
        BasisArg::Trig => Basis::Trig,
    }
}

/// Grid for fits in the given basis.
pub fn fit_grid(b: BasisArg) -> Grid {
    match b {
        BasisArg::Chebyshev => Grid::Lobatto,
        BasisArg::Trig => Grid::Circle,
    }
}

fn builtin_name(b: Builtin) -> &'static str {
    match b {
        Builtin::BernsteinNondiff => "bernstein-nondiff",
        Builtin::Abs => "abs",
        Builtin::SqrtAbs => "sqrt-abs",
        Builtin::Exp => "exp",
        Builtin::Runge => "runge",
    }
}

fn builtin_eval(b: Builtin, budget: u32) -> Result<impl Fn(f64) -> f64, CliError> {
    // validates the budget once; the value call below cannot fail on [-1, 1]
    bernstein_nondiff(0.0, budget).flag("budget")?;
    Ok(move |x: f64| {
        let x = x.clamp(-1.0, 1.0);
        match b {
            Builtin::BernsteinNondiff => bernstein_nondiff(x, budget).map(|v| v.value).unwrap_or(f64::NAN),
            Builtin::Abs => x.abs(),
            Builtin::SqrtAbs => x.abs().sqrt(),
            Builtin::Exp => x.exp(),
            Builtin::Runge => 1.0 / (1.0 + 25.0 * x * x),
        }
    })
}

/// Samples a built-in function, or loads one from a file.
pub fn sample(src: &FnSource, grid: Grid, default_points: usize) -> Result<SampledFn, CliError> {
    let b = match (src.func, &src.input) {
        (_, Some(path)) => return load_sampled(path, "in"),
        (Some(b), None) => b,
        (None, None) => unreachable!("clap requires a function"),
    };
    let m = src.points.unwrap_or(default_points);
    if m < 2 {
        return Err(CliError::flag("points", "need at least 2 grid intervals"));
    }
    let f = builtin_eval(b, src.budget)?;
    let name = builtin_name(b);
    let mut s = match grid {
        Grid::Lobatto => SampledFn::from_fn(Domain::Interval { a: -1.0, b: 1.0 }, chebyshev_lobatto(m, -1.0, 1.0), name, f),
        Grid::Uniform => SampledFn::from_fn(Domain::Interval { a: -1.0, b: 1.0 }, uniform_grid(m, -1.0, 1.0), name, f),
        Grid::Circle => SampledFn::from_fn(Domain::Circle, circle_grid(m), name, |t| f(t.cos())),
    }
    .flag("points")?;
    s.generator = Some(match (b, grid) {
        (Builtin::BernsteinNondiff, Grid::Circle) => format!("bernstein_nondiff(cos t, budget={})", src.budget),
        (Builtin::BernsteinNondiff, _) => format!("bernstein_nondiff(budget={})", src.budget),
        (_, Grid::Circle) => format!("{name}(cos t)"),
        _ => name.to_string(),
    });
    Ok(s)
}

fn row(f: &SampledFn, i: usize) -> impl Iterator<Item = Value> + '_ {
    f.values()[i * f.dim()..(i + 1) * f.dim()].iter().map(|v| json!(v))
}

pub fn run(cmd: &MinimaxCmd, _ctx: &Ctx) -> Result<Artifact, CliError> {
    match cmd {
        MinimaxCmd::Fit(a) => {
            let f = sample(&a.source, fit_grid(a.basis), 1024)?;
            let approx = best_uniform_approx(&f, a.degree, basis(a.basis)).flag("basis")?;
            let g = approx.sample(&f)?;
            let d = f.dim();
            let mut cols = vec!["x".to_string()];
            cols.extend((1..=d).map(|k| format!("f_{k}")));
            cols.extend((1..=d).map(|k| format!("fit_{k}")));
            let mut t = Table { columns: cols, rows: Vec::new() };
            for (i, x) in f.grid().iter().enumerate() {
                let mut r = vec![json!(x)];
                r.extend(row(&f, i));
                r.extend(row(&g, i));
                t.push(r);
            }
            let pts = |s: &SampledFn| s.grid().iter().zip(s.values().iter().step_by(d)).map(|(x, v)| (*x, *v)).collect();
            let plot = Plot {
                title: format!("degree {} best approximation", a.degree),
                x_label: "x".into(),
                y_label: "value".into(),
                log_x: false,
                log_y: false,
                series: vec![Series { name: f.name.clone(), points: pts(&f) }, Series { name: "fit".into(), points: pts(&g) }],
            };
            Ok(Artifact::new("minimax fit", a, &json!({ "function": f.generator, "approximation": approx }))?
                .with_table(t)
                .with_plot(plot))
        }
        MinimaxCmd::Profile(a) => {
            let f = sample(&a.source, fit_grid(a.basis), 1024)?;
            let p = en_profile(&f, a.n_max, basis(a.basis)).flag("basis")?;
            let mut t = Table::new(&["n", "E_n"]);
            t.push(vec![json!(0), json!(p.e0)]);
            let vals = p.errors.values(a.n_max as u64);
            for (i, e) in vals.iter().enumerate() {
                t.push(vec![json!(i + 1), json!(e)]);
            }
            let plot = Plot {
                title: format!("E_n of {}", f.name),
                x_label: "n".into(),
                y_label: "E_n".into(),
                log_x: false,
                log_y: true,
                series: vec![Series { name: "E_n".into(), points: vals.iter().enumerate().map(|(i, e)| ((i + 1) as f64, *e)).collect() }],
            };
            Ok(Artifact::new("minimax profile", a, &json!({ "function": f.generator, "profile": p }))?.with_table(t).with_plot(plot))
        }
        MinimaxCmd::Markov(a) => {
            let subset = match a.subset.as_deref() {
                None => Subset::Full,
                Some([s, t]) => Subset::Interval(*s, *t),
                Some(_) => return Err(CliError::flag("subset", "expected two values s,t")),
            };
            let p = markov_profile(basis(a.basis), a.n_max, subset).flag("subset")?;
            let mut t = Table::new(&["n", "lower", "upper", "gap", "method"]);
            for b in &p.values {
                t.push(vec![json!(b.n), json!(b.lower), json!(b.upper), json!(b.gap()), json!(b.method)]);
            }
            let series = |name: &str, f: fn(&bernstein_core::minimax::MarkovBracket) -> f64| Series {
                name: name.into(),
                points: p.values.iter().map(|b| (b.n as f64, f(b))).collect(),
            };
            let plot = Plot {
                title: "Markov constants".into(),
                x_label: "n".into(),
                y_label: "M_n".into(),
                log_x: true,
                log_y: true,
                series: vec![series("lower", |b| b.lower), series("upper", |b| b.upper)],
            };
            Ok(Artifact::new("minimax markov", a, &p)?.with_table(t).with_plot(plot))
        }
        MinimaxCmd::Sample(a) => {
            let f = sample(&a.source, fit_grid(a.basis), 1024)?;
            let mut art = Artifact::new("minimax sample", a, &f)?.with_table(sampled_table(&f));
            art.csv_meta = sampled_meta(&f)?;
            Ok(art)
        }
    }
}
