//! Diagnostics reports and their CSV / JSON / SVG emission.
//!
//! Reports are plain data: named numeric series, string metadata, and a list
//! of verdicts. Emission is deterministic — identical reports produce
//! byte-identical files — so report files double as regression artifacts.
//! Report-only verdicts never affect exit status.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    ReportOnly,
}

impl std::fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictStatus::Pass => write!(f, "pass"),
            VerdictStatus::Fail => write!(f, "fail"),
            VerdictStatus::ReportOnly => write!(f, "report-only"),
        }
    }
}

/// A named check with its outcome. `check` names the invariant tested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: VerdictStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Columns, metadata and verdicts for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub title: String,
    pub columns: Vec<Series>,
    pub metadata: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
}

impl DiagnosticsReport {
    pub fn new(title: impl Into<String>) -> Self {
        DiagnosticsReport {
            title: title.into(),
            columns: Vec::new(),
            metadata: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn insert_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.columns.push(Series {
            name: name.into(),
            values,
        });
    }

    pub fn push_verdict(
        &mut self,
        check: impl Into<String>,
        status: VerdictStatus,
        detail: impl Into<String>,
    ) {
        self.verdicts.push(Verdict {
            check: check.into(),
            status,
            detail: detail.into(),
        });
    }

    /// True when any non-report-only verdict failed.
    pub fn has_failure(&self) -> bool {
        self.verdicts
            .iter()
            .any(|v| v.status == VerdictStatus::Fail)
    }

    /// UTF-8 CSV with a header row; values printed with the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        let rows = self
            .columns
            .iter()
            .map(|c| c.values.len())
            .max()
            .unwrap_or(0);
        for row in 0..rows {
            let mut first = true;
            for col in &self.columns {
                if !first {
                    out.push(',');
                }
                first = false;
                if let Some(v) = col.values.get(row) {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Report(format!("json: {e}")))
    }

    /// Line plot of the first two numeric columns (x, y), 640x480 viewBox.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const PAD: f64 = 48.0;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        svg.push_str(&format!(
            "  <title>{}</title>\n  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n",
            xml_escape(&self.title)
        ));
        if self.columns.len() >= 2 {
            let xs = &self.columns[0].values;
            let ys = &self.columns[1].values;
            let n = xs.len().min(ys.len());
            if n >= 1 {
                let (xmin, xmax) = min_max(&xs[..n]);
                let (ymin, ymax) = min_max(&ys[..n]);
                let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
                let yspan = if ymax > ymin { ymax - ymin } else { 1.0 };
                let mut points = String::new();
                for i in 0..n {
                    let px = PAD + (xs[i] - xmin) / xspan * (W - 2.0 * PAD);
                    let py = H - PAD - (ys[i] - ymin) / yspan * (H - 2.0 * PAD);
                    let _ = write!(points, "{px:.2},{py:.2} ");
                }
                svg.push_str(&format!(
                    "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" \
                     points=\"{}\"/>\n",
                    points.trim_end()
                ));
                svg.push_str(&format!(
                    "  <text x=\"{PAD}\" y=\"{}\" font-size=\"12\">{} in [{ymin}, {ymax}]</text>\n",
                    H - PAD / 3.0,
                    xml_escape(&self.columns[1].name)
                ));
                svg.push_str(&format!(
                    "  <text x=\"{PAD}\" y=\"{}\" font-size=\"12\">{} in [{xmin}, {xmax}]</text>\n",
                    PAD / 2.0,
                    xml_escape(&self.columns[0].name)
                ));
            }
        }
        svg.push_str("</svg>\n");
        svg
    }

    /// Writes the report in `format` to `path`.
    pub fn emit(&self, format: ReportFormat, path: &Path) -> Result<()> {
        let text = match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
            ReportFormat::Svg => self.to_svg(),
        };
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, text)?;
        Ok(())
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    (min, max)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
