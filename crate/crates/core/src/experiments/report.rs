//! Machine-readable experiment reports.
//!
//! Two formats, both lossless:
//!
//! * JSON — the whole report serialized as one document;
//! * CSV — a records table (`n,rep,error,inv_error,sup_dev,tn,u_n`),
//!   followed by optional `excluded_*`, `summary_n` and `summary_key`
//!   sections separated by blank lines. Floats use shortest round-trip
//!   formatting, so `read` after `write` reproduces the report exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Consistency,
    Rate,
    GlivenkoCantelli,
    Occupation,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Consistency => "consistency",
            Self::Rate => "rate",
            Self::GlivenkoCantelli => "gc",
            Self::Occupation => "occupation",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "consistency" => Some(Self::Consistency),
            "rate" => Some(Self::Rate),
            "gc" => Some(Self::GlivenkoCantelli),
            "occupation" => Some(Self::Occupation),
            _ => None,
        }
    }
}

/// Output format of a report file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Measurements of one replication at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: u64,
    pub rep: u64,
    /// `|estimate(x0) - f0(x0)|`.
    pub error: f64,
    /// `|inverse_estimate(f0(x0)) - x0|`.
    pub inv_error: f64,
    /// Exact supremum deviation of the localized empirical distribution
    /// function from the invariant one.
    pub sup_dev: f64,
    /// Number of window visits.
    pub tn: u64,
    /// Deterministic occupation proxy `u(n)`.
    pub u_n: f64,
}

/// Per-sample-size summary statistics (medians across replications).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: u64,
    pub u_n: f64,
    pub reps_used: u64,
    pub excluded: u64,
    pub median_error: Option<f64>,
    pub median_inv_error: Option<f64>,
    pub median_sup_dev: Option<f64>,
    /// Median of `u(n)^{1/3} * error` (rate boundedness inspection).
    pub median_scaled_error: Option<f64>,
    /// Median of `T_n * sup_dev^2` (empirical-process boundedness).
    pub median_tn_supdev_sq: Option<f64>,
    /// `mean(T^2) / mean(T)^2` of the normalized occupation samples.
    pub moment_ratio: Option<f64>,
}

/// Run-level summary and pass/fail verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: ExperimentKind,
    pub per_n: Vec<NSummary>,
    /// Log-log slope of the median error against the sample size.
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub slope_target: Option<f64>,
    pub moment_ratio_target: Option<f64>,
    pub pass: bool,
    pub excluded_total: u64,
    pub notes: Vec<String>,
}

impl Summary {
    fn placeholder() -> Self {
        Self {
            kind: ExperimentKind::Consistency,
            per_n: Vec::new(),
            slope: None,
            slope_se: None,
            slope_target: None,
            moment_ratio_target: None,
            pass: false,
            excluded_total: 0,
            notes: Vec::new(),
        }
    }
}

/// Full experiment report: per-replication records, the excluded
/// replications (empty window), and the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<RepRecord>,
    /// `(n, rep)` pairs excluded for having no observations in the window.
    pub excluded: Vec<(u64, u64)>,
    pub summary: Summary,
}

pub(crate) const RECORD_HEADER: &str = "n,rep,error,inv_error,sup_dev,tn,u_n";
const EXCLUDED_HEADER: &str = "excluded_n,excluded_rep";
const NSUMMARY_HEADER: &str = "summary_n,u_n,reps_used,excluded,median_error,median_inv_error,\
                               median_sup_dev,median_scaled_error,median_tn_supdev_sq,moment_ratio";
const KEY_HEADER: &str = "summary_key,value";

fn opt(v: &Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(field: &str) -> Result<Option<f64>, ExperimentError> {
    if field.is_empty() {
        Ok(None)
    } else {
        field
            .parse()
            .map(Some)
            .map_err(|e| ExperimentError::ReportParse(format!("bad float '{field}': {e}")))
    }
}

fn parse_num<T: std::str::FromStr>(field: &str) -> Result<T, ExperimentError>
where
    T::Err: std::fmt::Display,
{
    field
        .parse()
        .map_err(|e| ExperimentError::ReportParse(format!("bad number '{field}': {e}")))
}

impl ExperimentReport {
    /// A report with no content: what a run that never executed would hold.
    pub fn empty() -> Self {
        Self {
            records: Vec::new(),
            excluded: Vec::new(),
            summary: Summary::placeholder(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(RECORD_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n, r.rep, r.error, r.inv_error, r.sup_dev, r.tn, r.u_n
            )
            .unwrap();
        }
        if *self == Self::empty() {
            return out;
        }
        if !self.excluded.is_empty() {
            out.push('\n');
            out.push_str(EXCLUDED_HEADER);
            out.push('\n');
            for (n, rep) in &self.excluded {
                writeln!(out, "{n},{rep}").unwrap();
            }
        }
        out.push('\n');
        out.push_str(&NSUMMARY_HEADER.replace(char::is_whitespace, ""));
        out.push('\n');
        for s in &self.summary.per_n {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                s.n,
                s.u_n,
                s.reps_used,
                s.excluded,
                opt(&s.median_error),
                opt(&s.median_inv_error),
                opt(&s.median_sup_dev),
                opt(&s.median_scaled_error),
                opt(&s.median_tn_supdev_sq),
                opt(&s.moment_ratio)
            )
            .unwrap();
        }
        out.push('\n');
        out.push_str(KEY_HEADER);
        out.push('\n');
        writeln!(out, "kind,{}", self.summary.kind.as_str()).unwrap();
        writeln!(out, "slope,{}", opt(&self.summary.slope)).unwrap();
        writeln!(out, "slope_se,{}", opt(&self.summary.slope_se)).unwrap();
        writeln!(out, "slope_target,{}", opt(&self.summary.slope_target)).unwrap();
        writeln!(
            out,
            "moment_ratio_target,{}",
            opt(&self.summary.moment_ratio_target)
        )
        .unwrap();
        writeln!(out, "pass,{}", self.summary.pass).unwrap();
        writeln!(out, "excluded_total,{}", self.summary.excluded_total).unwrap();
        for note in &self.summary.notes {
            writeln!(out, "note,{note}").unwrap();
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self, ExperimentError> {
        let bad = |msg: String| ExperimentError::ReportParse(msg);
        let mut lines = text.lines().peekable();
        match lines.next() {
            Some(h) if h == RECORD_HEADER => {}
            other => return Err(bad(format!("expected record header, got {other:?}"))),
        }
        let mut report = Self::empty();
        while let Some(&line) = lines.peek() {
            if line.is_empty() {
                break;
            }
            lines.next();
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(format!("record row needs 7 fields: '{line}'")));
            }
            report.records.push(RepRecord {
                n: parse_num(f[0])?,
                rep: parse_num(f[1])?,
                error: parse_num(f[2])?,
                inv_error: parse_num(f[3])?,
                sup_dev: parse_num(f[4])?,
                tn: parse_num(f[5])?,
                u_n: parse_num(f[6])?,
            });
        }
        let nsummary_header = NSUMMARY_HEADER.replace(char::is_whitespace, "");
        let mut saw_summary = false;
        while let Some(line) = lines.next() {
            if line.is_empty() {
                continue;
            }
            if line == EXCLUDED_HEADER {
                while let Some(&row) = lines.peek() {
                    if row.is_empty() {
                        break;
                    }
                    lines.next();
                    let f: Vec<&str> = row.split(',').collect();
                    if f.len() != 2 {
                        return Err(bad(format!("excluded row needs 2 fields: '{row}'")));
                    }
                    report.excluded.push((parse_num(f[0])?, parse_num(f[1])?));
                }
            } else if line == nsummary_header {
                saw_summary = true;
                while let Some(&row) = lines.peek() {
                    if row.is_empty() {
                        break;
                    }
                    lines.next();
                    let f: Vec<&str> = row.split(',').collect();
                    if f.len() != 10 {
                        return Err(bad(format!("summary row needs 10 fields: '{row}'")));
                    }
                    report.summary.per_n.push(NSummary {
                        n: parse_num(f[0])?,
                        u_n: parse_num(f[1])?,
                        reps_used: parse_num(f[2])?,
                        excluded: parse_num(f[3])?,
                        median_error: parse_opt(f[4])?,
                        median_inv_error: parse_opt(f[5])?,
                        median_sup_dev: parse_opt(f[6])?,
                        median_scaled_error: parse_opt(f[7])?,
                        median_tn_supdev_sq: parse_opt(f[8])?,
                        moment_ratio: parse_opt(f[9])?,
                    });
                }
            } else if line == KEY_HEADER {
                saw_summary = true;
                while let Some(&row) = lines.peek() {
                    if row.is_empty() {
                        break;
                    }
                    lines.next();
                    let (key, value) = row
                        .split_once(',')
                        .ok_or_else(|| bad(format!("key row needs 2 fields: '{row}'")))?;
                    match key {
                        "kind" => {
                            report.summary.kind = ExperimentKind::from_name(value)
                                .ok_or_else(|| bad(format!("unknown kind '{value}'")))?
                        }
                        "slope" => report.summary.slope = parse_opt(value)?,
                        "slope_se" => report.summary.slope_se = parse_opt(value)?,
                        "slope_target" => report.summary.slope_target = parse_opt(value)?,
                        "moment_ratio_target" => {
                            report.summary.moment_ratio_target = parse_opt(value)?
                        }
                        "pass" => report.summary.pass = parse_num(value)?,
                        "excluded_total" => report.summary.excluded_total = parse_num(value)?,
                        "note" => report.summary.notes.push(value.to_string()),
                        other => return Err(bad(format!("unknown summary key '{other}'"))),
                    }
                }
            } else {
                return Err(bad(format!("unexpected section header '{line}'")));
            }
        }
        let _ = saw_summary;
        Ok(report)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::ReportParse(e.to_string()))
    }
}

fn io_ctx(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write a report to `path` in the requested format.
pub fn write_report(
    report: &ExperimentReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), ExperimentError> {
    let body = match format {
        ReportFormat::Csv => report.to_csv_string(),
        ReportFormat::Json => {
            let mut s = report.to_json_string();
            s.push('\n');
            s
        }
    };
    fs::write(path, body).map_err(io_ctx(path))
}

/// Read a report back from `path`.
pub fn read_report(path: &Path, format: ReportFormat) -> Result<ExperimentReport, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_ctx(path))?;
    match format {
        ReportFormat::Csv => ExperimentReport::from_csv_str(&text),
        ReportFormat::Json => ExperimentReport::from_json_str(&text),
    }
}
