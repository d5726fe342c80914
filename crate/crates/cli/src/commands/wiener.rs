use bernstein_core::wiener::{evaluate, wiener_en, wiener_norm, WienerElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::artifact::{Artifact, Plot, Series, Table};
use crate::cli::WienerCmd;
use crate::error::{CliError, FlagContext};
use crate::io::load_wiener;
use crate::Ctx;

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub i: u64,
    pub trials: usize,
    /// `E_i(f)`, the distance to the truncation.
    pub truncation_error: f64,
    /// `‖f − S_i f‖` recomputed from the coefficients.
    pub truncation_distance: f64,
    pub best_candidate: f64,
    pub beaten: bool,
}

/// `‖f − h‖` for `h` of degree `≤ i` given by its coefficients on `|n| ≤ i`.
fn distance(f: &WienerElement, h: &[(i64, Vec<f64>)], tail: f64) -> f64 {
    let norm = f.norm_kind();
    let mut acc = tail;
    for (n, v) in h {
        let fv = f.coefficient(*n);
        let d: Vec<f64> = fv.iter().zip(v).map(|(a, b)| a - b).collect();
        acc += norm.norm(&d);
    }
    acc
}

/// Random degree-`i` candidates: perturbations of the truncation at several
/// scales, plus unrelated polynomials.
pub fn oracle_check(f: &WienerElement, i: u64, trials: usize, seed: u64) -> Result<CheckReport, CliError> {
    let tail = wiener_en(f, i)?;
    let span = i64::try_from(i).map_err(|_| CliError::flag("i", "degree too large"))?;
    if span > 1 << 16 {
        return Err(CliError::flag("i", "degree above 65536 is too large for candidate sampling"));
    }
    let truncation: Vec<(i64, Vec<f64>)> = (-span..=span).map(|n| (n, f.coefficient(n))).collect();
    let truncation_distance = distance(f, &truncation, tail);
    let scale = truncation.iter().flat_map(|(_, v)| v.iter()).fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for t in 0..trials {
        let size = match t % 4 {
            0 => scale,
            1 => scale * 1e-3,
            2 => scale * 1e-9,
            _ => scale * 1e-15,
        };
        let h: Vec<(i64, Vec<f64>)> = if t % 10 == 9 {
            truncation.iter().map(|(n, v)| (*n, v.iter().map(|_| rng.gen_range(-scale..=scale)).collect())).collect()
        } else {
            truncation.iter().map(|(n, v)| (*n, v.iter().map(|x| x + rng.gen_range(-size..=size)).collect())).collect()
        };
        best = best.min(distance(f, &h, tail));
    }
    Ok(CheckReport { i, trials, truncation_error: tail, truncation_distance, best_candidate: best, beaten: best < tail })
}

pub fn run(cmd: &WienerCmd, ctx: &Ctx) -> Result<Artifact, CliError> {
    match cmd {
        WienerCmd::En(a) => {
            let f = load_wiener(&a.input, "in")?;
            if let Some(i) = a.i {
                let en = wiener_en(&f, i).flag("i")?;
                let mut t = Table::new(&["i", "E_i"]);
                t.push(vec![json!(i), json!(en)]);
                return Ok(Artifact::new("wiener en", a, &json!({ "i": i, "en": en }))?.with_table(t));
            }
            let n_max = a.n_max.unwrap_or(1).min(ctx.horizon);
            let mut t = Table::new(&["i", "E_i"]);
            let mut pts = Vec::new();
            for i in 1..=n_max {
                let en = wiener_en(&f, i).flag("n-max")?;
                t.push(vec![json!(i), json!(en)]);
                pts.push((i as f64, en));
            }
            let plot = Plot {
                title: "E_i".into(),
                x_label: "i".into(),
                y_label: "E_i".into(),
                log_x: true,
                log_y: true,
                series: vec![Series { name: "E_i".into(), points: pts.clone() }],
            };
            let values: Vec<f64> = pts.iter().map(|p| p.1).collect();
            Ok(Artifact::new("wiener en", a, &json!({ "n_max": n_max, "en": values }))?.with_table(t).with_plot(plot))
        }
        WienerCmd::Norm(a) => {
            let f = load_wiener(&a.input, "in")?;
            Ok(Artifact::new("wiener norm", a, &json!({ "norm": wiener_norm(&f)? }))?)
        }
        WienerCmd::Eval(a) => {
            let f = load_wiener(&a.input, "in")?;
            if !a.t.is_finite() {
                return Err(CliError::flag("t", "angle must be finite"));
            }
            Ok(Artifact::new("wiener eval", a, &evaluate(&f, a.t, a.cutoff).flag("cutoff")?)?)
        }
        WienerCmd::Check(a) => {
            let f = load_wiener(&a.input, "in")?;
            let r = oracle_check(&f, a.i, a.trials, ctx.seed)?;
            Ok(Artifact::new("wiener check", a, &r)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bernstein_core::wiener::TargetNorm;

    #[test]
    fn truncation_is_never_beaten() {
        let f = WienerElement::from_coefficients(
            TargetNorm::L2,
            [(-3, vec![0.5, 1.0]), (0, vec![1.0, 0.0]), (2, vec![0.25, -0.25]), (7, vec![0.125, 0.0])],
        )
        .unwrap();
        for i in 0..9 {
            let r = oracle_check(&f, i, 500, 7).unwrap();
            assert!(!r.beaten, "{r:?}");
            assert_eq!(r.truncation_distance, r.truncation_error);
        }
    }
}
