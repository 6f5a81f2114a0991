//! Verification reports and report bundles.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::group::UniMat2;

/// Outcome of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub pass: bool,
    /// Heuristic probes are reported but never decide the overall outcome.
    pub heuristic: bool,
    pub samples: u64,
    pub worst_margin: f64,
    pub witness: Option<Vec<f64>>,
    pub seed: u64,
    pub wall_time_ms: u64,
    /// Named scalar diagnostics (minima, counts, computed constants).
    pub details: BTreeMap<String, f64>,
    /// Per-sample values for plot pipelines; only written in CSV output.
    #[serde(skip)]
    pub series: Vec<f64>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        VerificationReport {
            name: name.into(),
            pass: true,
            heuristic: false,
            samples: 0,
            worst_margin: f64::INFINITY,
            witness: None,
            seed,
            wall_time_ms: 0,
            details: BTreeMap::new(),
            series: Vec::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn set_detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), value);
    }

    /// Marks the report failed with the given witness.
    pub fn fail(&mut self, witness: Vec<f64>) {
        self.pass = false;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    /// Fails without a concrete input; keeps the `fail => witness` invariant.
    pub fn fail_plain(&mut self) {
        self.fail(Vec::new());
    }

    pub fn timed(mut self, start: std::time::Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_millis() as u64;
        self
    }

    /// Copy with the timing field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport { wall_time_ms: 0, ..self.clone() }
    }
}

/// Serializes matrices for witnesses: 8 reals each, row-major, interleaved.
pub fn matrix_witness(ms: &[&UniMat2]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.to_reals()).collect()
}

/// Several reports together with the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub reports: Vec<VerificationReport>,
    pub overall_pass: bool,
}

impl ReportBundle {
    pub fn new(config: serde_json::Value, reports: Vec<VerificationReport>) -> Self {
        let overall_pass = reports.iter().filter(|r| !r.heuristic).all(|r| r.pass);
        ReportBundle {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            reports,
            overall_pass,
        }
    }

    pub fn without_timing(&self) -> Self {
        ReportBundle {
            reports: self.reports.iter().map(|r| r.without_timing()).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    /// Summary rows, followed by one row per recorded sample.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["report", "kind", "index", "value", "pass", "samples", "seed", "wall_time_ms"])?;
        for r in &self.reports {
            w.write_record([
                r.name.as_str(),
                "worst_margin",
                "",
                &fmt_f64(r.worst_margin),
                if r.pass { "true" } else { "false" },
                &r.samples.to_string(),
                &r.seed.to_string(),
                &r.wall_time_ms.to_string(),
            ])?;
            for (k, v) in &r.details {
                w.write_record([r.name.as_str(), k.as_str(), "", &fmt_f64(*v), "", "", "", ""])?;
            }
        }
        for r in &self.reports {
            for (i, v) in r.series.iter().enumerate() {
                w.write_record([r.name.as_str(), "sample", &i.to_string(), &fmt_f64(*v), "", "", "", ""])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_ignores_heuristics() {
        let mut a = VerificationReport::new("a", 1);
        let mut b = VerificationReport::new("b", 1);
        b.heuristic = true;
        b.fail(vec![1.0]);
        assert!(ReportBundle::new(serde_json::Value::Null, vec![a.clone(), b.clone()]).overall_pass);
        a.fail_plain();
        assert!(!ReportBundle::new(serde_json::Value::Null, vec![a, b]).overall_pass);
    }

    #[test]
    fn failed_report_has_witness() {
        let mut a = VerificationReport::new("a", 0);
        a.fail(vec![2.0, 3.0]);
        a.fail(vec![4.0]);
        assert_eq!(a.witness, Some(vec![2.0, 3.0]));
    }

    #[test]
    fn csv_contains_series_rows() {
        let mut a = VerificationReport::new("lemma", 0);
        a.series = vec![0.5, 0.25];
        let bundle = ReportBundle::new(serde_json::Value::Null, vec![a]);
        let mut buf = Vec::new();
        bundle.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("lemma,sample,1,2.5e-1"));
        assert!(!bundle.to_json().contains("series"));
    }
}
