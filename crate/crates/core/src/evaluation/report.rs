//! CSV and plain-text rendering of evaluation reports.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvaluationReport;
use crate::constraints::ConstraintGroup;
use crate::error::{Error, Result};
use crate::ordering::{mean_by, DifficultyTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    #[serde(alias = "table_text")]
    Table,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "table" | "table_text" => Ok(ReportFormat::Table),
            other => Err(Error::Argument(format!("unknown report format `{other}`"))),
        }
    }
}

/// Groups from hardest to easiest by mean difficulty; groups the table does
/// not cover follow in declaration order.
pub fn group_order<T: Scalar>(table: Option<&DifficultyTable<T>>) -> Vec<ConstraintGroup> {
    let Some(table) = table else {
        return ConstraintGroup::ALL.to_vec();
    };
    let means = mean_by(table, |k| k.group());
    let mut known: Vec<(ConstraintGroup, T)> = means.into_iter().collect();
    known.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let mut out: Vec<ConstraintGroup> = known.into_iter().map(|(g, _)| g).collect();
    let missing: Vec<ConstraintGroup> = ConstraintGroup::ALL.into_iter().filter(|g| !out.contains(g)).collect();
    out.extend(missing);
    out
}

fn percent<T: Scalar>(v: T) -> f64 {
    v.as_f64() * 100.0
}

fn header(groups: &[ConstraintGroup]) -> Vec<String> {
    let mut h = vec!["mode".to_string(), "cddi".to_string(), "m".to_string()];
    h.extend(groups.iter().map(|g| format!("{} (%)", g.name())));
    h.push("C_level (%)".into());
    h.push("I_level (%)".into());
    h
}

fn row<T: Scalar>(r: &EvaluationReport<T>, groups: &[ConstraintGroup], fmt: impl Fn(f64) -> String) -> Vec<String> {
    let mut out = vec![
        r.mode.name().to_string(),
        r.cddi.map(|c| c.to_string()).unwrap_or_default(),
        r.m.to_string(),
    ];
    out.extend(
        groups
            .iter()
            .map(|g| r.groups.get(g).map(|t| fmt(percent(t.accuracy))).unwrap_or_default()),
    );
    out.push(fmt(percent(r.acc_cons)));
    out.push(fmt(percent(r.acc_inst)));
    out
}

/// One row per non-empty report; columns are `groups` then C_level and I_level.
pub fn emit_report<T: Scalar>(reports: &[EvaluationReport<T>], groups: &[ConstraintGroup], format: ReportFormat) -> Result<String> {
    let kept: Vec<&EvaluationReport<T>> = reports
        .iter()
        .filter(|r| {
            if r.m == 0 {
                tracing::warn!(mode = r.mode.name(), cddi = ?r.cddi, "omitting empty bucket");
            }
            r.m > 0
        })
        .collect();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header(groups)).map_err(csv_error)?;
            for r in kept {
                w.write_record(row(r, groups, |v| v.to_string())).map_err(csv_error)?;
            }
            finish(w)
        }
        ReportFormat::Table => {
            let mut rows = vec![header(groups)];
            rows.extend(kept.iter().map(|r| row(r, groups, |v| format!("{v:.2}"))));
            Ok(align(&rows))
        }
    }
}

/// Per-kind accuracy rows: mode, cddi, kind, group, accuracy, count.
pub fn per_kind_rows<T: Scalar>(reports: &[EvaluationReport<T>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode", "cddi", "kind", "group", "accuracy", "count"])
        .map_err(csv_error)?;
    for r in reports {
        for (kind, tally) in &r.kinds {
            w.write_record([
                r.mode.name().to_string(),
                r.cddi.map(|c| c.to_string()).unwrap_or_default(),
                kind.name().to_string(),
                kind.group().name().to_string(),
                tally.accuracy.as_f64().to_string(),
                tally.count.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    finish(w)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(format!("csv: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Data(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
}

fn align(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            out.push('\n');
        }
    }
    out
}
