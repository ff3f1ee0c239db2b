//! Experiment harness: missingness injection, synthetic data, streaming
//! replay and reports.

pub mod metrics;
pub mod missingness;
pub mod report;
pub mod stream;
pub mod synth;

pub use metrics::{tolerance_accuracy, Tolerance};
pub use missingness::{inject_missing, MissingMode, MissingnessSpec};
pub use report::{LatencyStats, MethodReport, RunReport};
pub use stream::{stream_eval, Baseline, InstanceRecord, Outcome, StreamConfig};
pub use synth::{generate as synth_generate, SynthKind, SynthParams};
