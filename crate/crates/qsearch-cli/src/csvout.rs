//! Deterministic CSV emission for trajectories and scans.
//!
//! All floats are printed with 12 significant digits in scientific
//! notation, so reruns of the same seed produce byte-identical files.

use std::io::Write as _;
use std::path::Path;

use qsearch::algorithms::RunTrajectory;

pub const TRAJECTORY_HEADER: &str = "step,queries,alpha,success_prob,angle_to_sigma,overlap_tau";
pub const SCAN_HEADER: &str = "time,probability";

/// 12 significant digits, locale-independent.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

/// An in-memory CSV document: one header line plus data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDoc {
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvDoc {
    pub fn new(header: impl Into<String>) -> Self {
        Self { header: header.into(), rows: Vec::new() }
    }

    pub fn trajectory(t: &RunTrajectory) -> Self {
        let mut doc = Self::new(TRAJECTORY_HEADER);
        for rec in &t.steps {
            doc.rows.push(format!(
                "{},{},{},{},{},{}",
                rec.step_index,
                rec.oracle_queries,
                sig(rec.alpha),
                sig(rec.success_prob),
                opt_sig(rec.angle_to_sigma),
                opt_sig(rec.overlap_tau),
            ));
        }
        doc
    }

    pub fn scan(samples: &[(f64, f64)]) -> Self {
        let mut doc = Self::new(SCAN_HEADER);
        for &(t, p) in samples {
            doc.rows.push(format!("{},{}", sig(t), sig(p)));
        }
        doc
    }

    /// Prepend a fixed column, for stitching sweep points together.
    pub fn with_prefix(&self, name: &str, value: &str) -> Self {
        Self {
            header: format!("{},{}", name, self.header),
            rows: self.rows.iter().map(|r| format!("{value},{r}")).collect(),
        }
    }

    /// Append all rows of another document with the same header.
    pub fn extend(&mut self, other: &CsvDoc) {
        assert_eq!(self.header, other.header, "cannot merge csv documents with different columns");
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.rows.len() + 1) * 64);
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsearch::algorithms::StepRecord;

    #[test]
    fn empty_trajectory_is_header_only() {
        let doc = CsvDoc::trajectory(&RunTrajectory { steps: Vec::new() });
        assert_eq!(doc.render(), format!("{TRAJECTORY_HEADER}\n"));
    }

    #[test]
    fn optional_columns_render_empty() {
        let t = RunTrajectory {
            steps: vec![StepRecord {
                step_index: 0,
                oracle_queries: 2,
                alpha: 0.5,
                success_prob: 0.25,
                angle_to_sigma: None,
                overlap_tau: None,
            }],
        };
        let doc = CsvDoc::trajectory(&t);
        assert_eq!(doc.rows[0], "0,2,5.00000000000e-1,2.50000000000e-1,,");
    }

    #[test]
    fn prefixing_adds_the_column_everywhere() {
        let mut doc = CsvDoc::new("a,b");
        doc.rows.push("1,2".into());
        let pre = doc.with_prefix("s", "0.3");
        assert_eq!(pre.header, "s,a,b");
        assert_eq!(pre.rows[0], "0.3,1,2");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(sig(0.0), "0.00000000000e0");
    }
}
