//! End-to-end per-scan processing: ring indices → optional re-skewing →
//! projection → optional hole filling → artifacts on disk, with an optional
//! evaluation pass (kept-point ratio and projection upper-bound mIoU).
//!
//! Independent scans run in a work pool; per-scan stage order is strictly
//! sequential and single-threaded, so outputs are byte-identical for any
//! thread count. Evaluation results go to per-scan `*.metrics.json` files
//! (fully deterministic); timings and checksums go to the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use rangekit_core::interpolation::{knni, KnniConfig, KnniVariant};
use rangekit_core::metrics::{compute_miou, kept_ratio, MeanMode};
use rangekit_core::motion::{self, TimestampVector};
use rangekit_core::projection::{self, ProjectionError, ProjectorConfig};
use rangekit_core::ring_index::{self, RingAssignment};

use crate::io::{self, FormatError};
use crate::manifest::{
    Checksums, FillJson, IouJson, Manifest, RingValidationJson, ScanMetrics, ScanRecord,
    SkewRecord, Timings, ToolInfo,
};
use crate::preview;

/// How an error maps onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input files → exit 2.
    Format,
    /// Bad parameters or unusable-but-well-formed inputs → exit 3.
    InvalidArguments,
    /// Internal invariant violations → exit 4.
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Format => 2,
            ErrorKind::InvalidArguments => 3,
            ErrorKind::Internal => 4,
        }
    }
}

#[derive(Debug, Error)]
#[error("[{stage}] {input}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub input: String,
    pub message: String,
    pub kind: ErrorKind,
}

impl PipelineError {
    fn new(stage: &'static str, input: &Path, kind: ErrorKind, message: impl ToString) -> Self {
        PipelineError {
            stage,
            input: input.display().to_string(),
            message: message.to_string(),
            kind,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

fn projection_error_kind(e: &ProjectionError) -> ErrorKind {
    match e {
        ProjectionError::CorruptedLut { .. } => ErrorKind::Internal,
        _ => ErrorKind::InvalidArguments,
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum RingSource {
    /// Run ring-index generation with this azimuth threshold (degrees).
    Generate { threshold_deg: f64 },
    /// Read a u16 ring sidecar; `None` derives `<scan>.ring` per input.
    Sidecar { path: Option<PathBuf> },
}

#[derive(Debug, Clone, Serialize)]
pub enum AlphaSource {
    /// Per-point timestamps from the azimuth of each point.
    AzimuthDerived,
    /// Read an f32 alpha sidecar; `None` derives `<scan>.alpha` per input.
    /// Sidecar alphas also pin the projection azimuths (θ = 360·α), which
    /// is exact for raw or re-skewed geometry.
    Sidecar { path: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ScanUnfolding,
    Spherical,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorSettings {
    pub method: Method,
    pub width: usize,
    /// Image height; `None` uses the ring count (scan unfolding only).
    pub height: Option<usize>,
    pub fov_up_deg: f64,
    pub fov_down_deg: f64,
}

impl ProjectorSettings {
    fn to_core(&self) -> ProjectorConfig {
        match self.method {
            Method::ScanUnfolding => {
                ProjectorConfig::ScanUnfolding { width: self.width, height: self.height }
            }
            Method::Spherical => ProjectorConfig::Spherical {
                height: self.height.unwrap_or(64),
                width: self.width,
                fov_up_deg: self.fov_up_deg,
                fov_down_deg: self.fov_down_deg,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SkewSettings {
    pub poses: PathBuf,
    pub calib: Option<PathBuf>,
    /// Pose index of the scan; `None` parses the file stem as the index.
    pub scan_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KnniSettings {
    pub window: usize,
    pub variant: char,
    pub wrap: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSettings {
    /// Label file; `None` derives `<scan>.label` per input.
    pub labels: Option<PathBuf>,
    pub num_classes: usize,
    pub ignore_class: Option<u32>,
    /// Divide the mean by all classes instead of only the present ones.
    pub all_classes_mean: bool,
    /// Apply the SemanticKITTI raw-id remap before scoring.
    pub remap_semantic_kitti: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub ring_source: RingSource,
    /// Clamp trailing overflow rings instead of reporting them.
    pub repair_rings: bool,
    pub max_rings: u16,
    pub max_per_ring: u32,
    pub skew: Option<SkewSettings>,
    pub alphas: AlphaSource,
    pub projector: ProjectorSettings,
    pub knni: Option<KnniSettings>,
    pub eval: Option<EvalSettings>,
    pub threads: usize,
    pub write_preview: bool,
}

impl PipelineConfig {
    fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: &str| {
            Err(PipelineError::new(
                "config",
                Path::new("-"),
                ErrorKind::InvalidArguments,
                msg,
            ))
        };
        if self.inputs.is_empty() {
            return fail("no input scans");
        }
        if self.inputs.len() > 1 {
            if matches!(&self.ring_source, RingSource::Sidecar { path: Some(_) }) {
                return fail("explicit --rings path requires a single input scan");
            }
            if matches!(&self.alphas, AlphaSource::Sidecar { path: Some(_) }) {
                return fail("explicit --alphas path requires a single input scan");
            }
            if self.eval.as_ref().is_some_and(|e| e.labels.is_some()) {
                return fail("explicit --labels path requires a single input scan");
            }
            if self.skew.as_ref().is_some_and(|s| s.scan_index.is_some()) {
                return fail("explicit --scan-index requires a single input scan");
            }
        }
        Ok(())
    }
}

pub struct PipelineOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

struct Stopwatch(Instant);

impl Stopwatch {
    fn start() -> Self {
        Stopwatch(Instant::now())
    }

    fn lap(&mut self) -> f64 {
        let ms = self.0.elapsed().as_secs_f64() * 1e3;
        self.0 = Instant::now();
        ms
    }
}

fn sidecar_path(input: &Path, explicit: &Option<PathBuf>, extension: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| input.with_extension(extension))
}

/// Pose index from a `000123.bin`-style file stem.
fn scan_index_from_stem(input: &Path) -> Result<usize, PipelineError> {
    input
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| {
            PipelineError::new(
                "skew",
                input,
                ErrorKind::InvalidArguments,
                "cannot derive a pose index from the file name; pass --scan-index",
            )
        })
}

fn format_err<'a>(stage: &'static str, input: &'a Path) -> impl Fn(FormatError) -> PipelineError + 'a {
    move |e| PipelineError::new(stage, input, ErrorKind::Format, e)
}

/// Run the configured pipeline over all inputs and write the manifest.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        PipelineError::new("config", &config.output_dir, ErrorKind::Format, e)
    })?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::new("config", Path::new("-"), ErrorKind::Internal, e))?;
    let records: Vec<ScanRecord> = pool.install(|| {
        config
            .inputs
            .par_iter()
            .map(|input| process_scan(config, input))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let manifest = Manifest {
        tool: ToolInfo::default(),
        config: serde_json::to_value(config)
            .map_err(|e| PipelineError::new("manifest", Path::new("-"), ErrorKind::Internal, e))?,
        scans: records,
    };
    let manifest_path = config.output_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| PipelineError::new("manifest", &manifest_path, ErrorKind::Internal, e))?;
    io::write_atomic(&manifest_path, json.as_bytes())
        .map_err(format_err("manifest", &manifest_path))?;
    Ok(PipelineOutcome { manifest, manifest_path })
}

fn process_scan(config: &PipelineConfig, input: &Path) -> Result<ScanRecord, PipelineError> {
    let mut timings = Timings::default();
    let total = Instant::now();
    let mut watch = Stopwatch::start();

    // Read.
    let scan = io::read_scan(input).map_err(format_err("read", input))?;
    let mut cloud = scan.cloud;
    let quarantined = scan.quarantined.len();
    timings.read = watch.lap();

    // Ring indices (scan unfolding only).
    let mut ring_validation = None;
    let rings: Option<RingAssignment> = if config.projector.method == Method::ScanUnfolding {
        let assignment = match &config.ring_source {
            RingSource::Generate { threshold_deg } => {
                ring_index::generate_ring_indices(&cloud, *threshold_deg)
                    .map_err(|e| PipelineError::new("rings", input, ErrorKind::InvalidArguments, e))?
            }
            RingSource::Sidecar { path } => {
                let ring_path = sidecar_path(input, path, "ring");
                let values = io::read_rings(&ring_path).map_err(format_err("rings", input))?;
                if values.len() != cloud.len() {
                    return Err(PipelineError::new(
                        "rings",
                        input,
                        ErrorKind::Format,
                        format!(
                            "{}: {} ring entries for {} points",
                            ring_path.display(),
                            values.len(),
                            cloud.len()
                        ),
                    ));
                }
                RingAssignment::from_rings(values)
            }
        };
        let mut assignment = assignment;
        let mut report =
            ring_index::validate_ring_indices(&assignment, config.max_rings, config.max_per_ring);
        if
            config.repair_rings && !report.max_ring_ok
        {
            assignment = ring_index::repair_trailing_noise(&assignment, config.max_rings)
                .map_err(|e| PipelineError::new("rings", input, ErrorKind::InvalidArguments, e))?;
            report = ring_index::validate_ring_indices(
                &assignment,
                config.max_rings,
                config.max_per_ring,
            );
        }
        ring_validation = Some(RingValidationJson::new(assignment.num_rings(), &report));
        Some(assignment)
    } else {
        None
    };
    timings.rings = watch.lap();

    // Timestamps.
    let alphas_from_sidecar = matches!(&config.alphas, AlphaSource::Sidecar { .. });
    let alphas: TimestampVector = match &config.alphas {
        AlphaSource::AzimuthDerived => motion::relative_timestamps(&cloud)
            .map_err(|e| PipelineError::new("alphas", input, ErrorKind::InvalidArguments, e))?,
        AlphaSource::Sidecar { path } => {
            let alpha_path = sidecar_path(input, path, "alpha");
            let values = io::read_alphas(&alpha_path).map_err(format_err("alphas", input))?;
            if values.len() != cloud.len() {
                return Err(PipelineError::new(
                    "alphas",
                    input,
                    ErrorKind::Format,
                    format!(
                        "{}: {} alpha entries for {} points",
                        alpha_path.display(),
                        values.len(),
                        cloud.len()
                    ),
                ));
            }
            TimestampVector::new(values)
                .map_err(|e| PipelineError::new("alphas", input, ErrorKind::Format, e))?
        }
    };

    // Re-skew.
    let mut skew_record = None;
    if let Some(skew) = &config.skew {
        let index = match skew.scan_index {
            Some(i) => i,
            None => scan_index_from_stem(input)?,
        };
        if index < 2 {
            skew_record = Some(SkewRecord {
                scan_index: index,
                applied: false,
                skipped_reason: Some("no two previous poses for a velocity prediction".into()),
                angular_velocity: None,
                translational_velocity: None,
            });
        } else {
            let mut poses = io::read_poses(&skew.poses).map_err(format_err("skew", input))?;
            if poses.len() <= index {
                return Err(PipelineError::new(
                    "skew",
                    input,
                    ErrorKind::InvalidArguments,
                    format!("pose file has {} entries, scan index is {index}", poses.len()),
                ));
            }
            if let Some(calib_path) = &skew.calib {
                let calib = io::read_calibration(calib_path).map_err(format_err("skew", input))?;
                for pose in poses.iter_mut() {
                    *pose = io::apply_calibration(pose, &calib);
                }
            }
            let relative = motion::predict_relative_pose(&poses[index - 2], &poses[index - 1]);
            let velocity = motion::estimate_velocities(&relative)
                .map_err(|e| PipelineError::new("skew", input, ErrorKind::InvalidArguments, e))?;
            cloud = motion::skew_scan(&cloud, &velocity, &alphas)
                .map_err(|e| PipelineError::new("skew", input, ErrorKind::InvalidArguments, e))?;
            let phi = velocity.angular().vector();
            let v = velocity.translational();
            skew_record = Some(SkewRecord {
                scan_index: index,
                applied: true,
                skipped_reason: None,
                angular_velocity: Some([phi.x, phi.y, phi.z]),
                translational_velocity: Some([v.x, v.y, v.z]),
            });
        }
    }
    if alphas_from_sidecar {
        // Sidecar alphas are firing fractions: 360·α is the firing azimuth,
        // exact for the geometry being projected (raw or re-skewed).
        let azimuths: Vec<f64> = alphas.as_slice().iter().map(|a| a * 360.0).collect();
        cloud = cloud
            .with_azimuths_deg(azimuths)
            .map_err(|e| PipelineError::new("alphas", input, ErrorKind::Internal, e))?;
    }
    timings.skew = watch.lap();

    // Labels attach before projection so the image carries a label channel.
    let gt_labels: Option<Vec<u32>> = match &config.eval {
        None => None,
        Some(eval) => {
            let label_path = sidecar_path(input, &eval.labels, "label");
            let raw = io::read_labels(&label_path).map_err(format_err("eval", input))?;
            if raw.len() != cloud.len() {
                return Err(PipelineError::new(
                    "eval",
                    input,
                    ErrorKind::Format,
                    format!(
                        "{}: {} labels for {} points",
                        label_path.display(),
                        raw.len(),
                        cloud.len()
                    ),
                ));
            }
            let mapped: Vec<u32> = if eval.remap_semantic_kitti {
                raw.iter().map(|&l| io::remap_semantic_kitti(l)).collect()
            } else {
                raw
            };
            cloud = cloud
                .with_labels(mapped.clone())
                .map_err(|e| PipelineError::new("eval", input, ErrorKind::Internal, e))?;
            Some(mapped)
        }
    };

    // Project.
    let result = projection::project(&cloud, &config.projector.to_core(), rings.as_ref())
        .map_err(|e| PipelineError::new("project", input, projection_error_kind(&e), e))?;
    timings.project = watch.lap();

    // Evaluate on the pure projection (hole filling is presentation, not
    // projection loss).
    let mut metrics_k_ratio = None;
    let mut metrics_upper = None;
    if let Some(eval) = &config.eval {
        let gt = gt_labels.as_ref().expect("labels read when eval is on");
        let reprojected = projection::unproject_labels(&result.image, &result.lut)
            .map_err(|e| PipelineError::new("eval", input, projection_error_kind(&e), e))?;
        let mode = if eval.all_classes_mean { MeanMode::AllClasses } else { MeanMode::ExcludeAbsent };
        let report = compute_miou(&reprojected, gt, eval.num_classes, eval.ignore_class, mode)
            .map_err(|e| PipelineError::new("eval", input, ErrorKind::InvalidArguments, e))?;
        metrics_k_ratio = Some(kept_ratio(&result, cloud.len()));
        metrics_upper = Some(IouJson::from(&report));
    }
    timings.eval = watch.lap();

    // Hole filling.
    let mut image = result.image;
    let mut fill_json = None;
    if let Some(settings) = &config.knni {
        let variant = match settings.variant.to_ascii_lowercase() {
            'a' => KnniVariant::A,
            'b' => KnniVariant::B,
            'c' => KnniVariant::C,
            other => {
                return Err(PipelineError::new(
                    "knni",
                    input,
                    ErrorKind::InvalidArguments,
                    format!("unknown variant {other:?} (expected a, b, or c)"),
                ));
            }
        };
        let knni_config = KnniConfig::new(settings.window, variant)
            .map_err(|e| PipelineError::new("knni", input, ErrorKind::InvalidArguments, e))?
            .with_wrap(settings.wrap);
        let (filled, report) = knni(&image, &knni_config)
            .map_err(|e| PipelineError::new("knni", input, ErrorKind::InvalidArguments, e))?;
        image = filled;
        fill_json = Some(FillJson::from(report));
    }
    timings.knni = watch.lap();

    // Write artifacts.
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scan".into());
    let rimg_path = config.output_dir.join(format!("{stem}.rimg"));
    let lut_path = config.output_dir.join(format!("{stem}.rlut"));
    io::write_range_image(&rimg_path, &image).map_err(format_err("write", input))?;
    io::write_lut(&lut_path, &result.lut).map_err(format_err("write", input))?;
    if config.write_preview {
        let preview_path = config.output_dir.join(format!("{stem}.png"));
        preview::write_preview(&preview_path, &image).map_err(format_err("write", input))?;
    }

    let metrics = ScanMetrics {
        input: input.display().to_string(),
        point_count: cloud.len(),
        ring_validation,
        k_ratio: metrics_k_ratio,
        upper_bound: metrics_upper,
        fill: fill_json,
    };
    let metrics_path = config.output_dir.join(format!("{stem}.metrics.json"));
    let json = serde_json::to_string_pretty(&metrics)
        .map_err(|e| PipelineError::new("write", input, ErrorKind::Internal, e))?;
    io::write_atomic(&metrics_path, json.as_bytes()).map_err(format_err("write", input))?;
    let metrics_checksum =
        Some(io::sha256_file(&metrics_path).map_err(format_err("write", input))?);
    timings.write = watch.lap();
    timings.total = total.elapsed().as_secs_f64() * 1e3;

    Ok(ScanRecord {
        input: input.display().to_string(),
        point_count: cloud.len(),
        quarantined_points: quarantined,
        checksums: Checksums {
            input: io::sha256_file(input).map_err(format_err("write", input))?,
            rimg: Some(io::sha256_file(&rimg_path).map_err(format_err("write", input))?),
            lut: Some(io::sha256_file(&lut_path).map_err(format_err("write", input))?),
            metrics: metrics_checksum,
        },
        timings_ms: timings,
        skew: skew_record,
    })
}
