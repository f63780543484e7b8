//! Machine-readable run reports (`dgp1-report/1`).
//!
//! JSON goes to stdout, diagnostics to stderr; the published schema lives in
//! `docs/report.schema.json`.

use dgp1_core::optics::{ModeledRun, OpticalConfig};
use dgp1_core::{ParadoxicalInstance, Realization};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub instance: InstanceDescriptor,
    pub method: String,
    /// Zero-test tolerance applied to the closing position.
    pub eps: f64,
    pub feasible: bool,
    pub solution_count: usize,
    pub solutions: Vec<SolutionRecord>,
    pub timing_ns: u64,
    pub threads: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Present only for the optics method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optics: Option<OpticsReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceDescriptor {
    pub n: usize,
    pub consecutive: Vec<f64>,
    pub closing: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl InstanceDescriptor {
    pub fn new(inst: &ParadoxicalInstance, source: Option<String>) -> Self {
        Self {
            n: inst.n(),
            consecutive: inst.consecutive().to_vec(),
            closing: inst.closing(),
            label: inst.label().map(str::to_owned),
            source,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionRecord {
    /// Row encoding of the sign vector in the implicit sign matrix.
    pub row: u64,
    pub signs: Vec<i8>,
    pub positions: Vec<f64>,
}

impl SolutionRecord {
    pub fn new(row: u64, realization: &Realization) -> Self {
        Self {
            row,
            signs: realization.signs.clone(),
            positions: realization.positions.clone(),
        }
    }
}

/// Optics-specific simulation report: config echo, candidate bookkeeping,
/// thresholds, and the device throughput model.
///
/// `candidate_rows` is the raw device readout; quantization can introduce
/// false positives, so candidates are re-checked exactly and split into
/// `verified_rows` and `false_positive_rows`. The feasibility verdict and
/// exit code still follow the device readout.
#[derive(Debug, Clone, Serialize)]
pub struct OpticsReport {
    pub config: OpticalConfig,
    pub frames_used: u64,
    pub candidate_rows: Vec<u64>,
    pub verified_rows: Vec<u64>,
    pub false_positive_rows: Vec<u64>,
    pub detection_threshold: f64,
    pub amplitude_error_bound: f64,
    pub scale: f64,
    pub all_zero_chain: bool,
    pub per_frame_min_intensity: Vec<f64>,
    pub throughput_macs_per_second: f64,
    pub modeled: ModeledRun,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Flat CSV view of the solution set: one line per solution, fields
    /// inside a cell separated by spaces.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,signs,positions\n");
        for s in &self.solutions {
            let signs: Vec<String> = s.signs.iter().map(i8::to_string).collect();
            let positions: Vec<String> = s.positions.iter().map(f64::to_string).collect();
            out.push_str(&format!("{},{},{}\n", s.row, signs.join(" "), positions.join(" ")));
        }
        out
    }
}
