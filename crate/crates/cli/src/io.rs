//! Loaders for error sequences, Wiener elements and sampled functions, from
//! either JSON (bare or inside an artifact envelope) or CSV.

use std::fs;

use bernstein_core::error_seq::{ErrorSeq, Provenance, TailRule};
use bernstein_core::minimax::{Domain, SampledFn};
use bernstein_core::wiener::{TargetNorm, WienerElement, WienerTail};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::artifact::{read_csv, Table};
use crate::error::CliError;

pub fn read(path: &str, flag: &'static str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::flag(flag, format!("{path}: {e}")))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// The `result` of an envelope, or the document itself.
fn payload(text: &str) -> Result<Value, CliError> {
    let mut v: Value = serde_json::from_str(text)?;
    Ok(match v.get_mut("result") {
        Some(r) => r.take(),
        None => v,
    })
}

fn from_json<T: DeserializeOwned>(text: &str, flag: &'static str) -> Result<T, CliError> {
    serde_json::from_value(payload(text)?).map_err(|e| CliError::flag(flag, e))
}

fn meta<'a>(meta: &'a [(String, String)], key: &str) -> Option<&'a str> {
    meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

/// CSV rows `(n, E_n)` for `n = 1, 2, …`, plus an optional `# tail:` rule.
pub fn load_errors(path: &str, flag: &'static str) -> Result<ErrorSeq, CliError> {
    let text = read(path, flag)?;
    if is_json(&text) {
        let mut v = payload(&text)?;
        // profiles wrap the sequence
        if let Some(inner) = v.get_mut("errors") {
            v = inner.take();
        }
        return serde_json::from_value(v).map_err(|e| CliError::flag(flag, format!("{path}: {e}")));
    }
    let (m, rows) = read_csv(&text).map_err(|e| CliError::flag(flag, format!("{path}: {e}")))?;
    let mut values = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        match r.as_slice() {
            [n, e] if *n == (i + 1) as f64 => values.push(*e),
            [n, _] => return Err(CliError::flag(flag, format!("{path}: expected n = {} in row {}, found {n}", i + 1, i + 1))),
            _ => return Err(CliError::flag(flag, format!("{path}: rows must be (n, E_n)"))),
        }
    }
    let tail = match meta(&m, "tail") {
        Some(t) => Some(serde_json::from_str::<TailRule>(t).map_err(|e| CliError::flag(flag, format!("{path}: tail: {e}")))?),
        None => None,
    };
    ErrorSeq::from_values(values, tail, Provenance::Tabulated).map_err(|e| CliError::flag(flag, format!("{path}: {e}")))
}

pub fn errors_table(e: &ErrorSeq, n_max: u64) -> Table {
    let mut t = Table::new(&["n", "E_n"]);
    for (i, v) in e.values(n_max).into_iter().enumerate() {
        t.push(vec![(i as u64 + 1).into(), v.into()]);
    }
    t
}

/// CSV rows `(frequency, v_1, …, v_d)`, with `# norm:`, `# dim:` and an
/// optional `# tail:` closed form.
pub fn load_wiener(path: &str, flag: &'static str) -> Result<WienerElement, CliError> {
    let text = read(path, flag)?;
    if is_json(&text) {
        return from_json(&text, flag).map_err(|e| CliError::flag(flag, format!("{path}: {e}")));
    }
    let ctx = |e: &dyn std::fmt::Display| CliError::flag(flag, format!("{path}: {e}"));
    let (m, rows) = read_csv(&text).map_err(|e| ctx(&e))?;
    let norm: TargetNorm = match meta(&m, "norm") {
        Some(n) => serde_json::from_value(Value::String(n.to_lowercase())).map_err(|e| ctx(&e))?,
        None => TargetNorm::L1,
    };
    let dim = match meta(&m, "dim") {
        Some(d) => d.parse::<usize>().map_err(|e| ctx(&e))?,
        None => rows.first().map_or(1, |r| r.len().saturating_sub(1)),
    };
    let mut f = WienerElement::zero(dim, norm);
    for r in &rows {
        let n = r[0];
        if n.fract() != 0.0 || n.abs() > 9.0e15 {
            return Err(ctx(&format!("frequency {n} is not an integer")));
        }
        if f.coefficients().contains_key(&(n as i64)) {
            return Err(ctx(&format!("frequency {n} appears twice")));
        }
        f.set(n as i64, r[1..].to_vec()).map_err(|e| ctx(&e))?;
    }
    if let Some(t) = meta(&m, "tail") {
        let tail: WienerTail = serde_json::from_str(t).map_err(|e| ctx(&e))?;
        f.set_tail(tail).map_err(|e| ctx(&e))?;
    }
    Ok(f)
}

pub fn wiener_table(f: &WienerElement) -> Table {
    let mut cols = vec!["frequency".to_string()];
    cols.extend((1..=f.dim()).map(|k| format!("v_{k}")));
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (n, v) in f.coefficients() {
        let mut row = vec![Value::from(*n)];
        row.extend(v.iter().map(|x| Value::from(*x)));
        t.push(row);
    }
    t
}

pub fn wiener_meta(f: &WienerElement) -> Result<Vec<(String, String)>, CliError> {
    let mut m = vec![
        ("norm".to_string(), serde_json::to_value(f.norm_kind())?.as_str().unwrap_or_default().to_string()),
        ("dim".to_string(), f.dim().to_string()),
    ];
    if let Some(t) = f.tail() {
        m.push(("tail".to_string(), serde_json::to_string(t)?));
    }
    Ok(m)
}

/// CSV rows `(x, v_1, …, v_d)`; the domain comes from `# domain:` or
/// defaults to the interval spanned by the grid.
pub fn load_sampled(path: &str, flag: &'static str) -> Result<SampledFn, CliError> {
    let text = read(path, flag)?;
    if is_json(&text) {
        return from_json(&text, flag).map_err(|e| CliError::flag(flag, format!("{path}: {e}")));
    }
    let ctx = |e: &dyn std::fmt::Display| CliError::flag(flag, format!("{path}: {e}"));
    let (m, rows) = read_csv(&text).map_err(|e| ctx(&e))?;
    if rows.is_empty() {
        return Err(ctx(&"no samples"));
    }
    let dim = rows[0].len().saturating_sub(1);
    if dim == 0 || rows.iter().any(|r| r.len() != dim + 1) {
        return Err(ctx(&"rows must be (x, v_1, …, v_d) with a fixed d ≥ 1"));
    }
    let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let values: Vec<f64> = rows.iter().flat_map(|r| r[1..].iter().copied()).collect();
    let domain = match meta(&m, "domain") {
        Some(d) => serde_json::from_str(d).map_err(|e| ctx(&e))?,
        None => Domain::Interval {
            a: grid.iter().copied().fold(f64::INFINITY, f64::min),
            b: grid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
    };
    let name = meta(&m, "name").unwrap_or(path).to_string();
    SampledFn::new(domain, grid, dim, values, name).map_err(|e| ctx(&e))
}

pub fn sampled_table(f: &SampledFn) -> Table {
    let mut cols = vec!["x".to_string()];
    cols.extend((1..=f.dim()).map(|k| format!("v_{k}")));
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (i, x) in f.grid().iter().enumerate() {
        let mut row = vec![Value::from(*x)];
        row.extend(f.values()[i * f.dim()..(i + 1) * f.dim()].iter().map(|v| Value::from(*v)));
        t.push(row);
    }
    t
}

pub fn sampled_meta(f: &SampledFn) -> Result<Vec<(String, String)>, CliError> {
    Ok(vec![("name".to_string(), f.name.clone()), ("domain".to_string(), serde_json::to_string(&f.domain())?)])
}
