use bernstein_core::geometry::{
    box_dimension_profile, coarea_check, condition_checks, covering_number, level_set_measure, thm215_cover,
    MarkovGrowth, PointCloud,
};
use bernstein_core::minimax::{best_uniform_approx, markov_profile, Subset};
use bernstein_core::rates::Role;
use serde_json::json;

use super::minimax::{basis, fit_grid, sample, Grid};
use super::rate;
use crate::artifact::{Artifact, Plot, Series, Table};
use crate::cli::{BasisArg, GraphCmd};
use crate::error::{CliError, FlagContext};
use crate::grammar::parse_gauge;
use crate::Ctx;

/// `a..b` (inclusive) or a comma-separated list of exponents.
pub fn parse_scales(s: &str) -> Result<Vec<i32>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: i32 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
        let b: i32 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end {b:?}"))?;
        if b < a {
            return Err(format!("empty range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad exponent {x:?}"))).collect()
}

fn max_dev(f: &[f64], g: &[f64]) -> f64 {
    f.iter().zip(g).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

pub fn run(cmd: &GraphCmd, ctx: &Ctx) -> Result<Artifact, CliError> {
    match cmd {
        GraphCmd::Boxdim(a) => {
            let exps = parse_scales(&a.scales).flag("scales")?;
            let f = sample(&a.source, Grid::Uniform, 1 << 18)?;
            let r = box_dimension_profile(&f, &exps).flag("scales")?;
            let mut t = Table::new(&["scale", "count", "sum", "bound"]);
            for c in &r.counts {
                t.push(vec![json!(c.scale), json!(c.count), json!(c.count as f64 * c.scale), json!(null)]);
            }
            let inv = |s: f64| 1.0 / s;
            let plot = Plot {
                title: format!("box counts of {}: slope {:.4}", f.name, r.slope),
                x_label: "1/ε".into(),
                y_label: "N(ε)".into(),
                log_x: true,
                log_y: true,
                series: vec![
                    Series { name: "N(ε)".into(), points: r.counts.iter().map(|c| (inv(c.scale), c.count as f64)).collect() },
                    Series {
                        name: "fit".into(),
                        points: r.counts.iter().map(|c| (inv(c.scale), (r.intercept - r.slope * c.scale.ln()).exp())).collect(),
                    },
                ],
            };
            let result = json!({ "function": f.generator, "samples": f.grid().len(), "report": r });
            Ok(Artifact::new("graph boxdim", a, &result)?.with_table(t).with_plot(plot))
        }
        GraphCmd::Cover(a) => {
            let psi = parse_gauge(&a.psi).flag("psi")?;
            if a.degrees.is_empty() {
                return Err(CliError::flag("degrees", "need at least one degree"));
            }
            let f = sample(&a.source, fit_grid(a.basis), 6000)?;
            let mut t = Table::new(&["scale", "count", "sum", "bound"]);
            let mut reports = Vec::new();
            for &n in &a.degrees {
                let approx = best_uniform_approx(&f, n, basis(a.basis)).flag("degrees")?;
                let gamma = match a.gamma {
                    Some(g) => g,
                    None => approx.error.max(max_dev(f.values(), approx.sample(&f)?.values())),
                };
                let markov = a.markov.unwrap_or(match a.basis {
                    BasisArg::Trig => n as f64,
                    BasisArg::Chebyshev => (n * n) as f64,
                });
                let r = thm215_cover(&f, &approx, markov, gamma, &psi, a.k).flag("markov")?;
                t.push(vec![json!(r.gamma), json!(r.cells.len()), json!(r.psi_k_sum), json!(r.bound)]);
                reports.push(json!({
                    "degree": n,
                    "verified": r.verified(),
                    "markov": r.markov,
                    "gamma": r.gamma,
                    "deviation": r.deviation,
                    "lipschitz": r.lipschitz,
                    "cov_constant": r.cov_constant,
                    "cells": r.cells.len(),
                    "members": r.members,
                    "points": r.points,
                    "psi_k_sum": r.psi_k_sum,
                    "count_bound": r.count_bound,
                    "bound": r.bound,
                    "diameters_ok": r.diameters_ok,
                    "sum_ok": r.sum_ok,
                }));
            }
            let result = json!({ "function": f.generator, "gauge": psi, "covers": reports });
            Ok(Artifact::new("graph cover", a, &result)?.with_table(t))
        }
        GraphCmd::Covering(a) => {
            let psi = a.psi.as_deref().map(parse_gauge).transpose().flag("psi")?;
            let f = sample(&a.source, Grid::Uniform, 1 << 12)?;
            let cloud = PointCloud::graph(&f);
            let mut t = Table::new(&["scale", "count", "sum", "bound"]);
            let mut reports = Vec::new();
            for &eps in &a.eps {
                let mut r = covering_number(&cloud, eps).flag("eps")?;
                if let Some(p) = &psi {
                    r = r.with_gauge(p);
                }
                t.push(vec![json!(eps), json!(r.exact.unwrap_or(r.greedy)), json!(r.psi_sum), json!(r.packing)]);
                reports.push(json!({
                    "scale": eps,
                    "greedy": r.greedy,
                    "packing": r.packing,
                    "exact": r.exact,
                    "psi_sum": r.psi_sum,
                }));
            }
            Ok(Artifact::new("graph covering", a, &json!({ "function": f.generator, "covers": reports }))?.with_table(t))
        }
        GraphCmd::Level(a) => {
            let psi = parse_gauge(&a.psi).flag("psi")?;
            let f = sample(&a.source, Grid::Uniform, 1 << 14)?;
            let r = level_set_measure(&f, a.level, &psi, a.k, a.d).flag("level")?;
            Ok(Artifact::new("graph level", a, &json!({ "function": f.generator, "estimate": r }))?)
        }
        GraphCmd::Coarea(a) => {
            let psi = parse_gauge(&a.psi).flag("psi")?;
            let f = sample(&a.source, Grid::Uniform, 1 << 14)?;
            let r = coarea_check(&f, &psi, a.k, a.levels).flag("levels")?;
            let mut t = Table::new(&["level", "sum"]);
            r.levels.iter().for_each(|(c, s)| t.push(vec![json!(c), json!(s)]));
            let plot = Plot {
                title: format!("level-set sums, ratio {:.4}", r.ratio),
                x_label: "c".into(),
                y_label: "sum".into(),
                log_x: false,
                log_y: false,
                series: vec![Series { name: "sum".into(), points: r.levels.clone() }],
            };
            let result = json!({ "function": f.generator, "within_envelope": r.within_envelope(), "report": r });
            Ok(Artifact::new("graph coarea", a, &result)?.with_table(t).with_plot(plot))
        }
        GraphCmd::Conditions(a) => {
            let phi = rate("phi", &a.phi, Role::Scale, ctx)?;
            let p = markov_profile(basis(a.basis), a.n_max, Subset::Full).flag("n-max")?;
            let r = condition_checks(&phi, &MarkovGrowth::from(&p), a.s, a.n_max as u64).flag("phi")?;
            let mut art = Artifact::new("graph conditions", a, &r)?;
            art.inconclusive = [&r.phi_markov, &r.phi_log_markov, &r.markov_power].iter().any(|c| c.holds.is_none());
            Ok(art)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales() {
        assert_eq!(parse_scales("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_scales("4..=5").unwrap(), vec![4, 5]);
        assert_eq!(parse_scales("3, 5,9").unwrap(), vec![3, 5, 9]);
        assert!(parse_scales("7..4").is_err());
        assert!(parse_scales("a").is_err());
    }
}
