use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// |measured − expected| ≤ tolerance
    Eq,
    /// measured ≥ expected − tolerance
    Ge,
    /// measured ≤ expected + tolerance
    Le,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Counts toward the exit status.
    Assert,
    /// Known discrepancy: reported, never fails the run.
    Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub expected: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, relation: Relation, expected: f64, measured: f64, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::Eq => (measured - expected).abs() <= tolerance,
            Relation::Ge => measured >= expected - tolerance,
            Relation::Le => measured <= expected + tolerance,
        };
        Check {
            name: name.to_string(),
            relation,
            expected,
            measured,
            tolerance,
            kind: CheckKind::Assert,
            pass,
            note: None,
        }
    }

    pub fn close(name: &str, expected: f64, measured: f64, tolerance: f64) -> Self {
        Self::new(name, Relation::Eq, expected, measured, tolerance)
    }

    pub fn at_least(name: &str, bound: f64, measured: f64) -> Self {
        Self::new(name, Relation::Ge, bound, measured, 0.0)
    }

    pub fn at_most(name: &str, bound: f64, measured: f64) -> Self {
        Self::new(name, Relation::Le, bound, measured, 0.0)
    }

    /// Boolean property, recorded as 1 = holds.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::new(name, Relation::Eq, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }

    pub fn flagged(mut self, note: &str) -> Self {
        self.kind = CheckKind::Flag;
        self.note = Some(note.to_string());
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub series: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(series: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Curve {
            series: series.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    /// Resolved parameters, defaults included.
    pub params: BTreeMap<String, f64>,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<Curve>,
}

impl Report {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Assert && !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn render<T: Serialize>(value: &T, format: Format, csv_rows: impl FnOnce() -> Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in csv_rows() {
                w.write_record(&row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Curves as (series, x, y) rows when present, the check table otherwise.
pub fn report_rows(report: &Report) -> Vec<Vec<String>> {
    if !report.curves.is_empty() {
        let mut rows = vec![vec!["series".into(), "x".into(), "y".into()]];
        for c in &report.curves {
            for (x, y) in &c.points {
                rows.push(vec![c.series.clone(), x.to_string(), y.to_string()]);
            }
        }
        return rows;
    }
    let mut rows = vec![["name", "relation", "expected", "measured", "tolerance", "kind", "pass"]
        .map(String::from)
        .to_vec()];
    for c in &report.checks {
        rows.push(vec![
            c.name.clone(),
            format!("{:?}", c.relation).to_lowercase(),
            c.expected.to_string(),
            c.measured.to_string(),
            c.tolerance.to_string(),
            format!("{:?}", c.kind).to_lowercase(),
            c.pass.to_string(),
        ]);
    }
    rows
}

pub fn render_report(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    render(report, format, || report_rows(report))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
