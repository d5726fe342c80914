//! Output artifacts: a JSON envelope or a CSV table, both carrying the
//! configuration and horizon that produced them.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

pub struct Artifact {
    pub command: String,
    pub config: Value,
    pub horizon: u64,
    pub seed: u64,
    pub result: Value,
    /// Rows for CSV output; without one the result is flattened to key/value pairs.
    pub table: Option<Table>,
    /// Extra `# key: value` lines for CSV output, read back by the loaders.
    pub csv_meta: Vec<(String, String)>,
    pub plot: Option<Plot>,
    pub inconclusive: bool,
}

impl Artifact {
    pub fn new(command: &str, config: &impl Serialize, result: &impl Serialize) -> Result<Self, CliError> {
        Ok(Artifact {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            horizon: 0,
            seed: 0,
            result: serde_json::to_value(result)?,
            table: None,
            csv_meta: Vec::new(),
            plot: None,
            inconclusive: false,
        })
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn with_plot(mut self, p: Plot) -> Self {
        self.plot = Some(p);
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": self.config,
                    "horizon": self.horizon,
                    "seed": self.seed,
                    "result": self.result,
                });
                let mut s = serde_json::to_string_pretty(&v)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        writeln!(out, "# command: {}", self.command).unwrap();
        writeln!(out, "# version: {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?).unwrap();
        writeln!(out, "# horizon: {}", self.horizon).unwrap();
        writeln!(out, "# seed: {}", self.seed).unwrap();
        for (k, v) in &self.csv_meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        let table = match &self.table {
            Some(t) => t.clone(),
            None => {
                let mut t = Table::new(&["key", "value"]);
                flatten("", &self.result, &mut t);
                t
            }
        };
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(cell))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner().map_err(|e| CliError::Output(e.to_string()))?).unwrap());
        Ok(out)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, t: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, t)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, t)),
        other => t.push(vec![Value::String(prefix.to_string()), other.clone()]),
    }
}

/// Splits CSV input into `# key: value` metadata and data records. A first
/// record whose leading field is not numeric is taken as a header.
pub fn read_csv(text: &str) -> Result<(Vec<(String, String)>, Vec<Vec<f64>>), CliError> {
    let meta = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let mut r = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError::Parse(format!("row {}: non-numeric field in {:?}", i + 1, rec))),
        }
    }
    Ok((meta, rows))
}

/// Standalone SVG line plot.
pub fn svg(p: &Plot) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 55.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let tx = |x: f64| if p.log_x { x.log10() } else { x };
    let ty = |y: f64| if p.log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = p
        .series
        .iter()
        .map(|s| s.points.iter().map(|&(x, y)| (tx(x), ty(y))).filter(|(x, y)| x.is_finite() && y.is_finite()).collect())
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(&p.title)).unwrap();
    writeln!(s, r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - L - R, H - T - B).unwrap();
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (x, y) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let lab = |v: f64, log: bool| if log { format!("1e{v:.2}") } else { format!("{v:.4}") };
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(x), H - B + 16.0, lab(x, p.log_x)).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, L - 6.0, sy(y) + 4.0, lab(y, p.log_y)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&p.x_label)).unwrap();
    writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, H / 2.0, H / 2.0, escape(&p.y_label)).unwrap();
    for (i, (series, pts)) in p.series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" ")).unwrap();
        if pts.len() <= 64 {
            for &(x, y) in pts {
                writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
            }
        }
        writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, L + 10.0, T + 16.0 + 14.0 * i as f64, escape(&series.name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&["n", "E_n"]);
        t.push(vec![json!(1), json!(0.5)]);
        t.push(vec![json!(2), json!(0.25)]);
        let mut a = Artifact::new("test", &json!({"a": 1}), &json!(null)).unwrap().with_table(t);
        a.csv_meta.push(("tail".into(), r#"{"kind":"zero"}"#.into()));
        let text = a.render(Format::Csv).unwrap();
        let (meta, rows) = read_csv(&text).unwrap();
        assert_eq!(rows, vec![vec![1.0, 0.5], vec![2.0, 0.25]]);
        assert!(meta.iter().any(|(k, v)| k == "tail" && v == r#"{"kind":"zero"}"#));
        assert!(meta.iter().any(|(k, v)| k == "config" && v == r#"{"a":1}"#));
    }

    #[test]
    fn flattened_result() {
        let a = Artifact::new("t", &json!({}), &json!({"x": {"y": [1, 2]}, "s": "ok"})).unwrap();
        let text = a.render(Format::Csv).unwrap();
        assert!(text.contains("x.y.0,1\n") && text.contains("x.y.1,2\n") && text.contains("s,ok\n"));
    }

    #[test]
    fn svg_is_standalone() {
        let p = Plot {
            title: "a <b>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![Series { name: "s".into(), points: vec![(1.0, 1.0), (10.0, 100.0), (0.0, 1.0)] }],
        };
        let s = svg(&p);
        assert!(s.starts_with("<svg xmlns=") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt;b&gt;"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
