use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::discrepancy::{sort_records, DiscrepancyClass, DiscrepancyRecord};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    /// JSON document.
    #[default]
    StructuredData,
    MarkdownTable,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::StructuredData),
            "md" | "markdown" => Ok(ReportFormat::MarkdownTable),
            _ => Err(HarnessError::Config(format!("unknown report format `{s}`"))),
        }
    }
}

pub const ALL_CONSISTENT: &str = "all consistent: no discrepancies above tolerance";

const GROUPS: [DiscrepancyClass; 4] = [
    DiscrepancyClass::Bug,
    DiscrepancyClass::Id,
    DiscrepancyClass::Rd,
    DiscrepancyClass::None,
];

/// JSON number, or a string for non-finite values, or null.
fn num(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number),
        Some(x) => Value::String(display_full(x)),
        None => Value::Null,
    }
}

fn display_full(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

fn display_2dp(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.2}"),
        Some(x) => display_full(x),
        None => "undefined".into(),
    }
}

#[derive(Serialize)]
struct Row {
    metric: String,
    variant_a: String,
    variant_b: String,
    value_a: Value,
    value_b: Value,
    delta: Value,
    class: String,
    display_a: String,
    display_b: String,
    display_delta: String,
}

#[derive(Serialize)]
struct Summary {
    records: usize,
    bug: usize,
    id: usize,
    rd: usize,
    none: usize,
    line: String,
}

#[derive(Serialize)]
struct Document {
    summary: Summary,
    notes: Vec<String>,
    records: Vec<Row>,
}

fn summary(records: &[DiscrepancyRecord]) -> Summary {
    let count = |c| records.iter().filter(|r| r.classification == c).count();
    let (bug, id, rd, none) = (
        count(DiscrepancyClass::Bug),
        count(DiscrepancyClass::Id),
        count(DiscrepancyClass::Rd),
        count(DiscrepancyClass::None),
    );
    let line = if bug + id + rd == 0 {
        ALL_CONSISTENT.to_string()
    } else {
        format!("{} records: {bug} BUG, {id} ID, {rd} RD, {none} NONE", records.len())
    };
    Summary {
        records: records.len(),
        bug,
        id,
        rd,
        none,
        line,
    }
}

fn row(r: &DiscrepancyRecord) -> Row {
    Row {
        metric: r.metric_id.name().into(),
        variant_a: r.descriptor_a.label(),
        variant_b: r.descriptor_b.label(),
        value_a: num(r.value_a),
        value_b: num(r.value_b),
        delta: num(r.abs_delta),
        class: r.classification.name().into(),
        display_a: display_2dp(r.value_a),
        display_b: display_2dp(r.value_b),
        display_delta: display_2dp(r.abs_delta),
    }
}

pub fn emit_report(records: &[DiscrepancyRecord], format: ReportFormat) -> String {
    emit_report_with_notes(records, format, &[])
}

/// Deterministic rendering; `records` are re-sorted first.
pub fn emit_report_with_notes(records: &[DiscrepancyRecord], format: ReportFormat, notes: &[String]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    match format {
        ReportFormat::StructuredData => {
            let doc = Document {
                summary: summary(&sorted),
                notes: notes.to_vec(),
                records: sorted.iter().map(row).collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        ReportFormat::MarkdownTable => markdown(&sorted, notes),
    }
}

fn markdown(records: &[DiscrepancyRecord], notes: &[String]) -> String {
    let mut out = String::from("# Discrepancy report\n\n");
    let _ = writeln!(out, "{}", summary(records).line);
    for n in notes {
        let _ = writeln!(out, "\n> note: {n}");
    }
    for g in GROUPS {
        let rows: Vec<Vec<String>> = records
            .iter()
            .filter(|r| r.classification == g)
            .map(|r| {
                vec![
                    r.metric_id.name().to_string(),
                    r.classification.name().to_string(),
                    r.descriptor_a.label(),
                    format!("{} ({})", display_2dp(r.value_a), r.value_a.map_or("-".into(), display_full)),
                    r.descriptor_b.label(),
                    format!("{} ({})", display_2dp(r.value_b), r.value_b.map_or("-".into(), display_full)),
                    format!("{} ({})", display_2dp(r.abs_delta), r.abs_delta.map_or("-".into(), display_full)),
                ]
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n## {g}\n");
        let header: Vec<String> = ["metric", "class", "variant A", "value A", "variant B", "value B", "|Δ|"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().chain([&header]).map(|r| r[c].chars().count()).max().unwrap())
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        out.push_str(&line(&header));
        out.push_str(&line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>()));
        for r in &rows {
            out.push_str(&line(r));
        }
    }
    out
}

/// Highest-severity exit status: 3 with any BUG, 2 with any ID, else 0.
pub fn exit_code(records: &[DiscrepancyRecord]) -> i32 {
    if records.iter().any(|r| r.classification == DiscrepancyClass::Bug) {
        3
    } else if records.iter().any(|r| r.classification == DiscrepancyClass::Id) {
        2
    } else {
        0
    }
}

pub fn write_report(path: &Path, document: &str) -> Result<()> {
    fs::write(path, document).map_err(|e| HarnessError::io(path, e))
}
