use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::independence::Measure;
use crate::slopes::SlopeEstimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Simulation,
    OutlierGrid,
    Benchmark,
}

/// Counts for one method at one sample size (and one outlier, for the grid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: String,
    pub n: usize,
    /// Outlier value `(x1, x2)` injected into the sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier: Option<[f64; 2]>,
    pub correct: usize,
    /// Replications where the method returned an error.
    pub failures: usize,
    pub replications: usize,
    /// Summed wall-clock time of the method's searches.
    pub seconds: f64,
}

impl CellResult {
    pub fn rate(&self) -> f64 {
        self.correct as f64 / self.replications as f64
    }
}

/// Kernel over distance-correlation time for one slope and sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRatio {
    pub slope: SlopeEstimator,
    pub n: usize,
    pub kbi_seconds: f64,
    pub dcorr_seconds: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub version: String,
    pub timestamp: String,
    pub settings: serde_json::Value,
    pub cells: Vec<CellResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timing_ratios: Vec<TimingRatio>,
    pub wall_seconds: f64,
}

impl ExperimentReport {
    pub(crate) fn new(kind: ExperimentKind, settings: serde_json::Value) -> Self {
        Self {
            kind,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            settings,
            cells: Vec::new(),
            timing_ratios: Vec::new(),
            wall_seconds: 0.0,
        }
    }

    /// Copy with the timestamp and all timings cleared, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.timestamp.clear();
        r.wall_seconds = 0.0;
        r.cells.iter_mut().for_each(|c| c.seconds = 0.0);
        r.timing_ratios.clear();
        r
    }

    pub fn cell(&self, method: &str, n: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.n == n && c.outlier.is_none())
    }

    pub fn outlier_cell(&self, method: &str, outlier: [f64; 2]) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.outlier == Some(outlier))
    }

    /// `(method, correct counts)` for comparing runs.
    pub fn counts(&self) -> Vec<(String, usize, Option<[f64; 2]>, usize, usize)> {
        self.cells
            .iter()
            .map(|c| (c.method.clone(), c.n, c.outlier, c.correct, c.failures))
            .collect()
    }

    pub(crate) fn fill_ratios(&mut self) {
        let mut ratios = Vec::new();
        for c in &self.cells {
            let Some((slope, measure)) = c.method.split_once('-') else { continue };
            if Measure::from_tag(measure) != Some(Measure::Kbi) {
                continue;
            }
            let Some(slope) = SlopeEstimator::from_tag(slope) else { continue };
            let other = format!("{}-{}", slope.tag(), Measure::DCorr.tag());
            if let Some(d) = self.cell(&other, c.n) {
                ratios.push(TimingRatio {
                    slope,
                    n: c.n,
                    kbi_seconds: c.seconds,
                    dcorr_seconds: d.seconds,
                    ratio: c.seconds / d.seconds,
                });
            }
        }
        self.timing_ratios = ratios;
    }

    fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.method) {
                out.push(c.method.clone());
            }
        }
        out
    }

    /// Aligned text: methods by sample size for simulations, one outlier
    /// grid per method for the grid experiment.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        if self.cells.is_empty() {
            return out;
        }
        match self.kind {
            ExperimentKind::OutlierGrid => self.grid_tables(&mut out),
            _ => self.size_table(&mut out),
        }
        out
    }

    fn size_table(&self, out: &mut String) {
        let mut sizes: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let timing = self.kind == ExperimentKind::Benchmark;
        let _ = write!(out, "{:<12}", "method");
        for n in &sizes {
            let _ = write!(out, "{:>12}", format!("n={n}"));
        }
        out.push('\n');
        for m in self.methods() {
            let _ = write!(out, "{m:<12}");
            for &n in &sizes {
                let v = match self.cell(&m, n) {
                    Some(c) if timing => format!("{:.3}s", c.seconds),
                    Some(c) => format!("{}/{}", c.correct, c.replications),
                    None => "-".into(),
                };
                let _ = write!(out, "{v:>12}");
            }
            out.push('\n');
        }
        for r in &self.timing_ratios {
            let _ = writeln!(out, "kbi/dcorr {} n={}: {:.2}", r.slope.tag(), r.n, r.ratio);
        }
    }

    fn grid_tables(&self, out: &mut String) {
        for m in self.methods() {
            let cells: Vec<&CellResult> = self.cells.iter().filter(|c| c.method == m).collect();
            let mut xs: Vec<f64> = cells.iter().filter_map(|c| c.outlier.map(|o| o[0])).collect();
            let mut ys: Vec<f64> = cells.iter().filter_map(|c| c.outlier.map(|o| o[1])).collect();
            for v in [&mut xs, &mut ys] {
                v.sort_by(f64::total_cmp);
                v.dedup();
            }
            let _ = writeln!(out, "{m} (rows: x1 outlier, columns: x2 outlier)");
            let _ = write!(out, "{:>8}", "");
            for y in &ys {
                let _ = write!(out, "{y:>7}");
            }
            out.push('\n');
            for &x in &xs {
                let _ = write!(out, "{x:>8}");
                for &y in &ys {
                    let v = self
                        .outlier_cell(&m, [x, y])
                        .map_or("-".to_string(), |c| c.correct.to_string());
                    let _ = write!(out, "{v:>7}");
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }

    /// One line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,n,outlier_x1,outlier_x2,correct,failures,replications,seconds\n");
        for c in &self.cells {
            let (ox, oy) = match c.outlier {
                Some([x, y]) => (x.to_string(), y.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.method, c.n, ox, oy, c.correct, c.failures, c.replications, c.seconds
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(method: &str, n: usize, seconds: f64) -> CellResult {
        CellResult {
            method: method.into(),
            n,
            outlier: None,
            correct: 7,
            failures: 1,
            replications: 10,
            seconds,
        }
    }

    #[test]
    fn ratios_and_tables() {
        let mut r = ExperimentReport::new(ExperimentKind::Benchmark, serde_json::json!({}));
        r.cells = vec![cell("ts-kbi", 50, 4.0), cell("ts-dcorr", 50, 0.5), cell("ols-kbi", 50, 1.0)];
        r.fill_ratios();
        assert_eq!(r.timing_ratios.len(), 1);
        assert_eq!(r.timing_ratios[0].ratio, 8.0);
        let text = r.to_text_table();
        assert!(text.contains("ts-kbi"));
        assert!(text.contains("4.000s"));
        assert_eq!(r.to_csv().lines().count(), 4);
        assert!(r.without_timing().timing_ratios.is_empty());
        assert_eq!(r.cell("ols-kbi", 50).unwrap().rate(), 0.7);
    }

    #[test]
    fn empty_report_has_empty_table() {
        let r = ExperimentReport::new(ExperimentKind::Simulation, serde_json::json!({}));
        assert_eq!(r.to_text_table(), "");
    }
}
