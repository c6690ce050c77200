//! CSV and JSON serialization of bound reports and sweep tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, SHAPE_NAMES};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// `x` with 17 significant digits in the style of C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A [`BoundReport`] as `name,value,ratio` CSV or as a JSON object.
pub fn emit_report(report: &BoundReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut out = String::from("name,value,ratio\n");
            for (name, value) in &report.shapes {
                let ratio = report
                    .ratios
                    .get(name)
                    .map(|&r| fmt_g17(r))
                    .unwrap_or_default();
                let _ = writeln!(out, "{},{},{}", csv_field(name), fmt_g17(*value), ratio);
            }
            Ok(out.into_bytes())
        }
    }
}

/// One line of a sweep: a measured (or shape-only) report tagged with the
/// sequence that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sequence: String,
    #[serde(rename = "S")]
    pub s_count: u64,
    pub report: BoundReport,
}

/// Column names of the sweep table: the identifying fields, `lhs`, then one
/// column per shape and one ratio column per shape.
pub fn sweep_header() -> Vec<String> {
    let mut cols: Vec<String> = ["N", "Q", "sequence", "S", "Z", "lhs"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(SHAPE_NAMES.iter().map(|s| s.to_string()));
    cols.extend(SHAPE_NAMES.iter().map(|s| format!("ratio_{s}")));
    cols
}

pub fn emit_sweep(rows: &[SweepRow], format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(rows)?;
            out.push(b'\n');
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut out = sweep_header().join(",");
            out.push('\n');
            for row in rows {
                let r = &row.report;
                let mut fields = vec![
                    fmt_g17(r.n),
                    fmt_g17(r.q),
                    csv_field(&row.sequence),
                    row.s_count.to_string(),
                    fmt_g17(r.z),
                    r.lhs.map(fmt_g17).unwrap_or_default(),
                ];
                for name in SHAPE_NAMES {
                    fields.push(r.shapes.get(name).map(|&v| fmt_g17(v)).unwrap_or_default());
                }
                for name in SHAPE_NAMES {
                    fields.push(r.ratios.get(name).map(|&v| fmt_g17(v)).unwrap_or_default());
                }
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}
