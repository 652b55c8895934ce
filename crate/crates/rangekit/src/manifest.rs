//! Run manifest: a JSON record of everything needed to audit or reproduce a
//! pipeline run — tool version, full configuration, input/output checksums,
//! and per-stage timings. Timings are the only non-deterministic content, so
//! evaluation results live in separate per-scan metrics files that compare
//! byte-for-byte across runs.

use serde::Serialize;

use rangekit_core::interpolation::FillReport;
use rangekit_core::metrics::IouReport;
use rangekit_core::ring_index::RingValidationReport;

#[derive(Serialize)]
pub struct Manifest {
    pub tool: ToolInfo,
    pub config: serde_json::Value,
    pub scans: Vec<ScanRecord>,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: "rangekit", version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Serialize)]
pub struct ScanRecord {
    pub input: String,
    pub point_count: usize,
    pub quarantined_points: usize,
    pub checksums: Checksums,
    pub timings_ms: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skew: Option<SkewRecord>,
}

#[derive(Serialize, Default)]
pub struct Checksums {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rimg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lut: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<String>,
}

#[derive(Serialize, Default)]
pub struct Timings {
    pub total: f64,
    pub read: f64,
    pub rings: f64,
    pub skew: f64,
    pub project: f64,
    pub knni: f64,
    pub eval: f64,
    pub write: f64,
}

#[derive(Serialize)]
pub struct SkewRecord {
    pub scan_index: usize,
    pub applied: bool,
    /// Why skewing was skipped, when it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_velocity: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translational_velocity: Option<[f64; 3]>,
}

/// Deterministic per-scan evaluation output (no timings). Serialized to its
/// own JSON file so repeated runs compare byte-identical.
#[derive(Serialize)]
pub struct ScanMetrics {
    pub input: String,
    pub point_count: usize,
    pub ring_validation: Option<RingValidationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<IouJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fill: Option<FillJson>,
}

#[derive(Serialize)]
pub struct RingValidationJson {
    pub num_rings: u16,
    pub max_ring_ok: bool,
    pub max_per_line_ok: bool,
    pub violations: Vec<String>,
}

impl RingValidationJson {
    pub fn new(num_rings: u16, report: &RingValidationReport) -> Self {
        RingValidationJson {
            num_rings,
            max_ring_ok: report.max_ring_ok,
            max_per_line_ok: report.max_per_line_ok,
            violations: report
                .violations
                .iter()
                .map(|v| format!("{:?} ring {} count {}", v.rule, v.ring, v.count))
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct IouJson {
    pub miou: f64,
    pub per_class_iou: Vec<Option<f64>>,
}

impl From<&IouReport> for IouJson {
    fn from(r: &IouReport) -> Self {
        IouJson { miou: r.miou, per_class_iou: r.per_class_iou.clone() }
    }
}

#[derive(Serialize)]
pub struct FillJson {
    pub filled_count: usize,
    pub remaining_invalid: usize,
    pub ignored_label_count: usize,
}

impl From<FillReport> for FillJson {
    fn from(r: FillReport) -> Self {
        FillJson {
            filled_count: r.filled_count,
            remaining_invalid: r.remaining_invalid,
            ignored_label_count: r.ignored_label_count,
        }
    }
}
