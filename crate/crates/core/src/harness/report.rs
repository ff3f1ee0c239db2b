use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Task;
use crate::ga::GaConfig;
use crate::harness::metrics::Tolerance;
use crate::harness::missingness::MissingnessSpec;
use crate::harness::stream::InstanceRecord;
use crate::harness::synth::SynthParams;

/// Wall-clock statistics in microseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub mean_us: f64,
    pub median_us: f64,
    pub total_s: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: impl Iterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = samples.collect();
        if v.is_empty() {
            return LatencyStats::default();
        }
        v.sort_by(f64::total_cmp);
        let total: f64 = v.iter().sum();
        let mid = v.len() / 2;
        let median = if v.len() % 2 == 0 { 0.5 * (v[mid - 1] + v[mid]) } else { v[mid] };
        LatencyStats {
            mean_us: total / v.len() as f64,
            median_us: median,
            total_s: total * 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    /// Accuracy (%) for classification, tolerance accuracy (%) over all
    /// outputs for regression. Unanswerable instances count as misses.
    pub score: f64,
    /// Regression only: tolerance accuracy (%) per output.
    pub per_output: Vec<f64>,
    pub unanswerable: usize,
    pub latency: LatencyStats,
    pub log: Vec<InstanceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub task: Task,
    pub missing: MissingnessSpec,
    pub tolerance: Tolerance,
    pub ga: GaConfig,
    pub instances: usize,
    pub n_features: usize,
    pub n_avail: usize,
    pub members: usize,
    pub committee_size: Option<usize>,
    pub committee_curve: Vec<(usize, f64)>,
    pub notes: Vec<String>,
    pub methods: Vec<MethodReport>,
    pub generator: Option<SynthParams>,
}

impl RunReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        for m in &mut r.methods {
            m.latency = LatencyStats::default();
            for rec in &mut m.log {
                rec.latency_us = 0.0;
            }
        }
        r
    }

    /// Plain-text table: method, missing per instance, score, run time.
    pub fn summary_table(&self) -> String {
        let metric = match self.task {
            Task::Classification => "Accuracy (%)",
            Task::Regression => "Tol. accuracy (%)",
        };
        let missing = match &self.missing.mode {
            crate::harness::missingness::MissingMode::Mcar { count } => count.to_string(),
            other => format!("{other:?}"),
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>8} {:>18} {:>14} {:>14} {:>12}",
            "Method", "Missing", metric, "Run time (s)", "Median (us)", "Unanswered"
        );
        for m in &self.methods {
            let _ = writeln!(
                out,
                "{:<10} {:>8} {:>18.2} {:>14.4} {:>14.1} {:>12}",
                m.method, missing, m.score, m.latency.total_s, m.latency.median_us, m.unanswerable
            );
            if !m.per_output.is_empty() {
                let parts: Vec<String> = m.per_output.iter().map(|s| format!("{s:.2}")).collect();
                let _ = writeln!(out, "{:<10} per-output: {}", "", parts.join(" / "));
            }
        }
        out
    }
}
