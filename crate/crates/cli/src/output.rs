//! Table and JSON emission.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files; divergences print as `inf`, in JSON
//! as the string `"inf"` since JSON has no infinity literal.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

use microrev::sweeps::{CurveRow, MapRow};
use microrev::verify::VerifyReport;
use microrev::ExtremumResult;

use crate::args::Format;

/// Shortest round-trip text; exponent form outside `[1e-5, 1e16)`.
pub fn float(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || !m.is_finite() || (1e-5..1e16).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// JSON number, or the string `"inf"`/`"-inf"`/`"nan"` for non-finite values.
pub fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(float(x)), Value::Number)
}

/// A header plus string rows, rendered as CSV or as a JSON object list.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json_float(*x),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl Table {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::csv))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn to_json(&self, params: Value) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "params": params, "rows": rows })
    }

    pub fn emit(&self, format: Format, params: Value, out: Option<&Path>) -> Result<()> {
        with_output(out, |w| match format {
            Format::Csv => self.write_csv(w),
            Format::Json => write_json(w, &self.to_json(params)),
        })
    }

    /// Values of one column as floats (non-float cells skipped).
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.header.iter().position(|h| *h == name) else {
            return vec![];
        };
        self.rows
            .iter()
            .filter_map(|r| match r[k] {
                Cell::Float(x) => Some(x),
                _ => None,
            })
            .collect()
    }
}

pub fn write_json(mut w: impl Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

/// Runs `f` against the named file, or standard output.
pub fn with_output(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub const MAP_HEADER: [&str; 10] = [
    "c_i",
    "c_f",
    "theta_i",
    "theta_f",
    "p_forward",
    "p_backward",
    "ratio",
    "q_over_de",
    "gamma",
    "diverged",
];

pub fn map_table(rows: &[MapRow]) -> Table {
    Table {
        header: MAP_HEADER.to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Float(r.c_i),
                    Cell::Float(r.c_f),
                    Cell::Float(r.theta_i),
                    Cell::Float(r.theta_f),
                    Cell::Float(r.p_forward),
                    Cell::Float(r.p_backward),
                    Cell::Float(r.ratio),
                    Cell::Float(r.q_over_de),
                    Cell::Float(r.gamma),
                    Cell::Bool(r.diverged),
                ]
            })
            .collect(),
    }
}

pub fn cut_table(rows: &[MapRow]) -> Table {
    Table {
        header: vec![
            "c",
            "theta_i",
            "theta_f",
            "p_forward",
            "p_backward",
            "ratio",
            "q_over_de",
            "gamma",
            "diverged",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Float(r.c_i),
                    Cell::Float(r.theta_i),
                    Cell::Float(r.theta_f),
                    Cell::Float(r.p_forward),
                    Cell::Float(r.p_backward),
                    Cell::Float(r.ratio),
                    Cell::Float(r.q_over_de),
                    Cell::Float(r.gamma),
                    Cell::Bool(r.diverged),
                ]
            })
            .collect(),
    }
}

pub fn curve_table(rows: &[CurveRow]) -> Table {
    Table {
        header: vec![
            "beta_delta_e",
            "p_forward",
            "p_backward",
            "ratio",
            "q_over_de",
            "gamma",
            "diverged",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Float(r.beta_delta_e),
                    Cell::Float(r.p_forward),
                    Cell::Float(r.p_backward),
                    Cell::Float(r.ratio),
                    Cell::Float(r.q_over_de),
                    Cell::Float(r.gamma),
                    Cell::Bool(r.diverged),
                ]
            })
            .collect(),
    }
}

pub fn extremum_table(e: &ExtremumResult) -> Table {
    Table {
        header: vec!["kind", "c_i", "c_f", "theta_i", "theta_f", "gamma", "residual"],
        rows: vec![vec![
            Cell::Text(e.kind.as_str().to_string()),
            Cell::Float(e.c_i_star),
            Cell::Float(e.c_f_star),
            Cell::Float(e.theta_i_star),
            Cell::Float(e.theta_f_star),
            Cell::Float(e.gamma_star),
            Cell::Float(e.refinement_residual),
        ]],
    }
}

pub fn extremum_summary(e: &ExtremumResult) -> String {
    format!(
        "{} {} {} {} {}",
        e.kind.as_str(),
        float(e.c_i_star),
        float(e.c_f_star),
        float(e.gamma_star),
        float(e.refinement_residual)
    )
}

pub fn verify_table(r: &VerifyReport) -> Table {
    Table {
        header: vec!["suite", "check", "passed", "max_error", "tolerance"],
        rows: r
            .suites
            .iter()
            .flat_map(|s| {
                s.checks.iter().map(|c| {
                    vec![
                        Cell::Text(s.suite.to_string()),
                        Cell::Text(c.name.clone()),
                        Cell::Bool(c.passed),
                        Cell::Float(c.max_error),
                        Cell::Float(c.tolerance),
                    ]
                })
            })
            .collect(),
    }
}
