//! `rangekit` — command-line front end for the LiDAR range-image toolkit.
//!
//! Exit codes: 0 success, 2 format error in an input file, 3 invalid
//! arguments, 4 internal invariant violation.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rangekit::core::cloud::PointCloud;
use rangekit::core::geometry::Vec3;
use rangekit::core::interpolation::{knni, KnniConfig, KnniVariant};
use rangekit::core::metrics::{self, MeanMode};
use rangekit::core::motion::{self, TimestampVector};
use rangekit::core::projection::{self, ProjectorConfig};
use rangekit::core::ring_index::{self, RingAssignment};
use rangekit::core::simulator::{self, Scene, SensorModel};
use rangekit::io;
use rangekit::pipeline::{
    self, AlphaSource, EvalSettings, KnniSettings, Method, PipelineConfig, ProjectorSettings,
    RingSource, SkewSettings,
};
use rangekit::preview;

#[derive(Parser)]
#[command(name = "rangekit", version, about = "Rotating-LiDAR range image toolkit")]
struct Cli {
    /// Worker threads for multi-scan commands (0 = one per CPU core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized operations (simulation dropout).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory where output artifacts are written.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign a ring index to every point of a scan and validate it.
    RingIndex(RingIndexArgs),
    /// Restore firing-time geometry from a motion-compensated scan.
    Skew(MotionArgs),
    /// Motion-compensate a raw scan into the scan-start frame.
    Deskew(MotionArgs),
    /// Project a scan onto a range image (+ look-up table).
    Project(ProjectArgs),
    /// Fill invalid range-image pixels from horizontal neighbors.
    Knni(KnniArgs),
    /// Evaluation metrics: skew MSE, kept-point ratio, upper-bound mIoU.
    Metrics(MetricsArgs),
    /// Generate a synthetic scan with ground truth.
    Simulate(SimulateArgs),
    /// Full pipeline: rings -> (skew) -> project -> knni -> artifacts.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct RingIndexArgs {
    /// Input scan (.bin).
    input: PathBuf,
    /// Azimuth continuity threshold, degrees.
    #[arg(long, default_value_t = ring_index::DEFAULT_AZIMUTH_THRESHOLD_DEG)]
    threshold: f64,
    #[arg(long, default_value_t = ring_index::KITTI_MAX_RINGS)]
    max_rings: u16,
    #[arg(long, default_value_t = ring_index::KITTI_MAX_POINTS_PER_RING)]
    max_per_ring: u32,
    /// Clamp trailing overflow rings to the last valid ring.
    #[arg(long)]
    repair: bool,
    /// Output ring file (default: <output-dir>/<stem>.ring).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MotionArgs {
    /// Input scan (.bin).
    scan: PathBuf,
    /// Trajectory file (12 reals per line, row-major 3x4).
    poses: PathBuf,
    /// Index of this scan in the trajectory.
    #[arg(long)]
    scan_index: usize,
    /// Rigid calibration applied to the poses (KITTI calib.txt or 12 reals).
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Per-point timestamp sidecar (f32, revolution fractions); default
    /// derives timestamps from the input azimuths.
    #[arg(long)]
    alphas: Option<PathBuf>,
    /// Output scan (default: <output-dir>/<stem>.skewed.bin / .deskewed.bin).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    /// Input scan (.bin).
    input: PathBuf,
    /// Projection method: su++ (scan unfolding) or sp (spherical).
    #[arg(long, default_value = "su++")]
    method: String,
    #[arg(long, default_value_t = 2048)]
    width: usize,
    /// Image height (su++ default: ring count; sp default: 64).
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_UP_DEG)]
    fov_up: f64,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_DOWN_DEG)]
    fov_down: f64,
    /// Ring sidecar file; without it rings are generated on the fly.
    #[arg(long)]
    rings: Option<PathBuf>,
    #[arg(long, default_value_t = ring_index::DEFAULT_AZIMUTH_THRESHOLD_DEG)]
    ring_threshold: f64,
    /// Label file to carry into the image's label channel.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Alpha sidecar; when present, projection azimuths are 360*alpha.
    #[arg(long)]
    alphas: Option<PathBuf>,
    /// Output image (default: <output-dir>/<stem>.rimg).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Look-up table output (default: <output-dir>/<stem>.rlut).
    #[arg(long)]
    lut: Option<PathBuf>,
    /// Also write a PNG preview of the range channel.
    #[arg(long)]
    preview: Option<PathBuf>,
}

#[derive(Args)]
struct KnniArgs {
    /// Input range image (.rimg).
    input: PathBuf,
    /// Window size K (odd, >= 3).
    #[arg(short, long, default_value_t = 3)]
    k: usize,
    /// Fill variant: a (copy nearest), b (mean), c (ignore boundaries).
    #[arg(long, default_value = "a")]
    variant: String,
    /// Treat rows as cyclic.
    #[arg(long)]
    wrap: bool,
    /// Label written on variant-c boundary disagreement.
    #[arg(long, default_value_t = 0)]
    ignored_label: u32,
    /// Output image (default: <output-dir>/<stem>.knni.rimg).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Mean squared error between two index-aligned scans.
    #[arg(long, num_args = 2, value_names = ["SCAN_A", "SCAN_B"])]
    mse: Option<Vec<PathBuf>>,
    /// Kept-point ratio of a projection.
    #[arg(long)]
    kratio: bool,
    /// Upper-bound mIoU of a projection (requires --labels).
    #[arg(long)]
    upper_bound: bool,
    #[arg(long)]
    scan: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value = "su++")]
    method: String,
    #[arg(long, default_value_t = 2048)]
    width: usize,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_UP_DEG)]
    fov_up: f64,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_DOWN_DEG)]
    fov_down: f64,
    #[arg(long)]
    rings: Option<PathBuf>,
    #[arg(long, default_value_t = ring_index::DEFAULT_AZIMUTH_THRESHOLD_DEG)]
    ring_threshold: f64,
    #[arg(long)]
    alphas: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    num_classes: usize,
    #[arg(long)]
    ignore_class: Option<u32>,
    /// Remap raw SemanticKITTI label ids to the 19 training classes.
    #[arg(long)]
    remap: bool,
    /// Average over all classes instead of only the present ones.
    #[arg(long)]
    all_classes_mean: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scene description (JSON); omit for a built-in demo scene.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Sensor preset. Currently: kitti64.
    #[arg(long, default_value = "kitti64")]
    sensor: String,
    /// Angular velocity, rad/scan, as "x,y,z".
    #[arg(long, default_value = "0,0,0", value_parser = parse_vec3)]
    phi: Vec3,
    /// Translational velocity, m/scan, as "x,y,z".
    #[arg(long, default_value = "0,0,0", value_parser = parse_vec3)]
    v: Vec3,
    /// Per-sample dropout probability in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Override the preset's samples per revolution.
    #[arg(long)]
    samples: Option<usize>,
    /// Output name prefix (files land in --output-dir).
    #[arg(long, default_value = "sim")]
    out_prefix: String,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input scans (.bin).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Ring source: generate (on the fly) or sidecar (<scan>.ring files).
    #[arg(long, default_value = "generate")]
    ring_source: String,
    #[arg(long, default_value_t = ring_index::DEFAULT_AZIMUTH_THRESHOLD_DEG)]
    ring_threshold: f64,
    /// Explicit ring sidecar (single input only).
    #[arg(long)]
    rings: Option<PathBuf>,
    #[arg(long)]
    repair_rings: bool,
    #[arg(long, default_value_t = ring_index::KITTI_MAX_RINGS)]
    max_rings: u16,
    #[arg(long, default_value_t = ring_index::KITTI_MAX_POINTS_PER_RING)]
    max_per_ring: u32,
    /// Trajectory file; its presence switches re-skewing on.
    #[arg(long)]
    poses: Option<PathBuf>,
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Pose index (single input only; default parses the file stem).
    #[arg(long)]
    scan_index: Option<usize>,
    /// Read <scan>.alpha sidecars for timestamps (and exact azimuths).
    #[arg(long)]
    alpha_sidecar: bool,
    /// Explicit alpha sidecar (single input only).
    #[arg(long)]
    alphas: Option<PathBuf>,
    #[arg(long, default_value = "su++")]
    method: String,
    #[arg(long, default_value_t = 2048)]
    width: usize,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_UP_DEG)]
    fov_up: f64,
    #[arg(long, default_value_t = projection::DEFAULT_FOV_DOWN_DEG)]
    fov_down: f64,
    /// KNNI window size; omit to skip hole filling.
    #[arg(long)]
    knni_k: Option<usize>,
    #[arg(long, default_value = "a")]
    knni_variant: String,
    #[arg(long)]
    knni_wrap: bool,
    /// Evaluate kept-point ratio and upper-bound mIoU (needs labels).
    #[arg(long)]
    eval: bool,
    /// Explicit label file (single input only; default <scan>.label).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    num_classes: usize,
    #[arg(long)]
    ignore_class: Option<u32>,
    #[arg(long)]
    remap: bool,
    #[arg(long)]
    all_classes_mean: bool,
    /// Write PNG previews next to the images.
    #[arg(long)]
    preview: bool,
}

enum CliError {
    Format(io::FormatError),
    Invalid(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Format(e) => write!(f, "format error: {e}"),
            CliError::Invalid(e) => write!(f, "invalid arguments: {e}"),
            CliError::Internal(e) => write!(f, "internal error: {e}"),
        }
    }
}

impl From<io::FormatError> for CliError {
    fn from(e: io::FormatError) -> Self {
        CliError::Format(e)
    }
}

fn invalid(e: impl Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|e| format!("bad number {part:?}: {e}"))?;
    }
    Ok(Vec3::new(values[0], values[1], values[2]))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(3);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("rangekit: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.output_dir)
        .map_err(|e| CliError::Format(io::FormatError::io(&cli.output_dir, e)))?;
    match &cli.command {
        Command::RingIndex(args) => cmd_ring_index(&cli, args),
        Command::Skew(args) => cmd_motion(&cli, args, true),
        Command::Deskew(args) => cmd_motion(&cli, args, false),
        Command::Project(args) => cmd_project(&cli, args),
        Command::Knni(args) => cmd_knni(&cli, args),
        Command::Metrics(args) => cmd_metrics(&cli, args),
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Pipeline(args) => cmd_pipeline(&cli, args),
    }
}

fn default_output(cli: &Cli, input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    cli.output_dir.join(format!("{stem}{suffix}"))
}

fn read_cloud_warn_quarantine(path: &Path) -> Result<PointCloud, CliError> {
    let scan = io::read_scan(path)?;
    if !scan.quarantined.is_empty() {
        eprintln!(
            "rangekit: warning: {} quarantined {} non-finite point(s) (zeroed)",
            path.display(),
            scan.quarantined.len()
        );
    }
    Ok(scan.cloud)
}

fn cmd_ring_index(cli: &Cli, args: &RingIndexArgs) -> Result<(), CliError> {
    let cloud = read_cloud_warn_quarantine(&args.input)?;
    let degenerate = cloud.positions().iter().filter(|p| p.x == 0.0 && p.y == 0.0).count();
    if degenerate > 0 {
        eprintln!(
            "rangekit: warning: {degenerate} point(s) with undefined azimuth inherit their predecessor's angle"
        );
    }
    let mut assignment =
        ring_index::generate_ring_indices(&cloud, args.threshold).map_err(invalid)?;
    let mut report =
        ring_index::validate_ring_indices(&assignment, args.max_rings, args.max_per_ring);
    let mut repaired = false;
    if args.repair && !report.max_ring_ok {
        assignment =
            ring_index::repair_trailing_noise(&assignment, args.max_rings).map_err(invalid)?;
        report = ring_index::validate_ring_indices(&assignment, args.max_rings, args.max_per_ring);
        repaired = true;
    }
    let output = args.output.clone().unwrap_or_else(|| default_output(cli, &args.input, ".ring"));
    io::write_rings(&output, assignment.rings())?;
    let json = json!({
        "input": args.input.display().to_string(),
        "output": output.display().to_string(),
        "points": cloud.len(),
        "num_rings": assignment.num_rings(),
        "threshold_deg": args.threshold,
        "repaired": repaired,
        "max_ring_ok": report.max_ring_ok,
        "max_per_line_ok": report.max_per_line_ok,
        "violations": report.violations.iter().map(|v| {
            json!({ "rule": format!("{:?}", v.rule), "ring": v.ring, "count": v.count })
        }).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(())
}

fn load_alphas(
    cloud: &PointCloud,
    path: &Option<PathBuf>,
) -> Result<TimestampVector, CliError> {
    match path {
        Some(p) => {
            let values = io::read_alphas(p)?;
            if values.len() != cloud.len() {
                return Err(invalid(format!(
                    "{}: {} alpha entries for {} points",
                    p.display(),
                    values.len(),
                    cloud.len()
                )));
            }
            TimestampVector::new(values).map_err(invalid)
        }
        None => motion::relative_timestamps(cloud).map_err(invalid),
    }
}

fn cmd_motion(cli: &Cli, args: &MotionArgs, skew: bool) -> Result<(), CliError> {
    let cloud = read_cloud_warn_quarantine(&args.scan)?;
    let suffix = if skew { ".skewed.bin" } else { ".deskewed.bin" };
    let output = args.output.clone().unwrap_or_else(|| default_output(cli, &args.scan, suffix));
    let verb = if skew { "skew" } else { "deskew" };

    if args.scan_index < 2 {
        io::write_scan(&output, &cloud)?;
        println!(
            "{verb}: scan index {} has no two previous poses; wrote unmodified copy to {}",
            args.scan_index,
            output.display()
        );
        return Ok(());
    }
    let mut poses = io::read_poses(&args.poses)?;
    if poses.len() <= args.scan_index {
        return Err(invalid(format!(
            "pose file has {} entries, scan index is {}",
            poses.len(),
            args.scan_index
        )));
    }
    if let Some(calib_path) = &args.calib {
        let calib = io::read_calibration(calib_path)?;
        for pose in poses.iter_mut() {
            *pose = io::apply_calibration(pose, &calib);
        }
    }
    let relative =
        motion::predict_relative_pose(&poses[args.scan_index - 2], &poses[args.scan_index - 1]);
    let velocity = motion::estimate_velocities(&relative).map_err(invalid)?;
    let alphas = load_alphas(&cloud, &args.alphas)?;
    let transformed = if skew {
        motion::skew_scan(&cloud, &velocity, &alphas)
    } else {
        motion::deskew_scan(&cloud, &velocity, &alphas)
    }
    .map_err(invalid)?;
    io::write_scan(&output, &transformed)?;

    let phi = velocity.angular().vector();
    let v = velocity.translational();
    println!("{verb}: scan index {}", args.scan_index);
    println!("  angular velocity (rad/scan):        [{:.9}, {:.9}, {:.9}]", phi.x, phi.y, phi.z);
    println!("  translational velocity (m/scan):    [{:.9}, {:.9}, {:.9}]", v.x, v.y, v.z);
    println!("  points: {}", transformed.len());
    println!("  output: {}", output.display());
    Ok(())
}

struct ProjectionInputs {
    cloud: PointCloud,
    rings: Option<RingAssignment>,
    config: ProjectorConfig,
}

#[allow(clippy::too_many_arguments)]
fn prepare_projection(
    input: &Path,
    method: &str,
    width: usize,
    height: Option<usize>,
    fov_up: f64,
    fov_down: f64,
    rings_path: &Option<PathBuf>,
    ring_threshold: f64,
    labels_path: &Option<PathBuf>,
    remap: bool,
    alphas_path: &Option<PathBuf>,
) -> Result<ProjectionInputs, CliError> {
    let mut cloud = read_cloud_warn_quarantine(input)?;
    if let Some(p) = alphas_path {
        let alphas = io::read_alphas(p)?;
        if alphas.len() != cloud.len() {
            return Err(invalid(format!(
                "{}: {} alpha entries for {} points",
                p.display(),
                alphas.len(),
                cloud.len()
            )));
        }
        let azimuths: Vec<f64> = alphas.iter().map(|a| a * 360.0).collect();
        cloud = cloud.with_azimuths_deg(azimuths).map_err(invalid)?;
    }
    if let Some(p) = labels_path {
        let mut labels = io::read_labels(p)?;
        if labels.len() != cloud.len() {
            return Err(invalid(format!(
                "{}: {} labels for {} points",
                p.display(),
                labels.len(),
                cloud.len()
            )));
        }
        if remap {
            for l in labels.iter_mut() {
                *l = io::remap_semantic_kitti(*l);
            }
        }
        cloud = cloud.with_labels(labels).map_err(invalid)?;
    }
    let (rings, config) = match method {
        "su++" | "su" => {
            let assignment = match rings_path {
                Some(p) => {
                    let values = io::read_rings(p)?;
                    if values.len() != cloud.len() {
                        return Err(invalid(format!(
                            "{}: {} ring entries for {} points",
                            p.display(),
                            values.len(),
                            cloud.len()
                        )));
                    }
                    RingAssignment::from_rings(values)
                }
                None => ring_index::generate_ring_indices(&cloud, ring_threshold)
                    .map_err(invalid)?,
            };
            (Some(assignment), ProjectorConfig::ScanUnfolding { width, height })
        }
        "sp" => (
            None,
            ProjectorConfig::Spherical {
                height: height.unwrap_or(64),
                width,
                fov_up_deg: fov_up,
                fov_down_deg: fov_down,
            },
        ),
        other => return Err(invalid(format!("unknown method {other:?} (expected su++ or sp)"))),
    };
    Ok(ProjectionInputs { cloud, rings, config })
}

fn cmd_project(cli: &Cli, args: &ProjectArgs) -> Result<(), CliError> {
    let inputs = prepare_projection(
        &args.input,
        &args.method,
        args.width,
        args.height,
        args.fov_up,
        args.fov_down,
        &args.rings,
        args.ring_threshold,
        &args.labels,
        false,
        &args.alphas,
    )?;
    let result = projection::project(&inputs.cloud, &inputs.config, inputs.rings.as_ref())
        .map_err(invalid)?;
    let output = args.output.clone().unwrap_or_else(|| default_output(cli, &args.input, ".rimg"));
    let lut_path = args.lut.clone().unwrap_or_else(|| default_output(cli, &args.input, ".rlut"));
    io::write_range_image(&output, &result.image)?;
    io::write_lut(&lut_path, &result.lut)?;
    if let Some(png) = &args.preview {
        preview::write_preview(png, &result.image)?;
    }
    let json = json!({
        "input": args.input.display().to_string(),
        "image": output.display().to_string(),
        "lut": lut_path.display().to_string(),
        "height": result.image.height,
        "width": result.image.width,
        "points": inputs.cloud.len(),
        "kept": result.kept_count,
        "k_ratio": metrics::kept_ratio(&result, inputs.cloud.len().max(1)),
    });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(())
}

fn cmd_knni(cli: &Cli, args: &KnniArgs) -> Result<(), CliError> {
    let image = io::read_range_image(&args.input)?;
    let variant = match args.variant.to_ascii_lowercase().as_str() {
        "a" => KnniVariant::A,
        "b" => KnniVariant::B,
        "c" => KnniVariant::C,
        other => return Err(invalid(format!("unknown variant {other:?} (expected a, b, or c)"))),
    };
    let config = KnniConfig::new(args.k, variant)
        .map_err(invalid)?
        .with_wrap(args.wrap)
        .with_ignored_label(args.ignored_label);
    let (filled, report) = knni(&image, &config).map_err(invalid)?;
    let output =
        args.output.clone().unwrap_or_else(|| default_output(cli, &args.input, ".knni.rimg"));
    io::write_range_image(&output, &filled)?;
    let json = json!({
        "input": args.input.display().to_string(),
        "output": output.display().to_string(),
        "k": args.k,
        "variant": args.variant,
        "wrap": args.wrap,
        "filled_count": report.filled_count,
        "remaining_invalid": report.remaining_invalid,
        "ignored_label_count": report.ignored_label_count,
    });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(())
}

fn cmd_metrics(_cli: &Cli, args: &MetricsArgs) -> Result<(), CliError> {
    let modes = usize::from(args.mse.is_some())
        + usize::from(args.kratio)
        + usize::from(args.upper_bound);
    if modes != 1 {
        return Err(invalid("pick exactly one of --mse, --kratio, --upper-bound"));
    }

    if let Some(files) = &args.mse {
        let a = read_cloud_warn_quarantine(&files[0])?;
        let b = read_cloud_warn_quarantine(&files[1])?;
        let mse = metrics::skew_mse(&a, &b).map_err(invalid)?;
        let json = json!({
            "scan_a": files[0].display().to_string(),
            "scan_b": files[1].display().to_string(),
            "points": a.len(),
            "mse_x": mse.mse_x,
            "mse_y": mse.mse_y,
            "mse_z": mse.mse_z,
            "mse_r": mse.mse_r,
        });
        println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
        return Ok(());
    }

    let scan = args.scan.as_ref().ok_or_else(|| invalid("--scan is required for this mode"))?;
    let inputs = prepare_projection(
        scan,
        &args.method,
        args.width,
        args.height,
        args.fov_up,
        args.fov_down,
        &args.rings,
        args.ring_threshold,
        &if args.upper_bound { args.labels.clone() } else { None },
        args.remap,
        &args.alphas,
    )?;
    let result = projection::project(&inputs.cloud, &inputs.config, inputs.rings.as_ref())
        .map_err(invalid)?;
    let k_ratio = metrics::kept_ratio(&result, inputs.cloud.len().max(1));

    if args.kratio {
        let json = json!({
            "scan": scan.display().to_string(),
            "method": args.method,
            "points": inputs.cloud.len(),
            "kept": result.kept_count,
            "k_ratio": k_ratio,
        });
        println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
        return Ok(());
    }

    // Upper bound: reproject the ground-truth labels and score them.
    let gt = inputs
        .cloud
        .labels()
        .ok_or_else(|| invalid("--labels is required for --upper-bound"))?
        .to_vec();
    let reprojected =
        projection::unproject_labels(&result.image, &result.lut).map_err(invalid)?;
    let mode = if args.all_classes_mean { MeanMode::AllClasses } else { MeanMode::ExcludeAbsent };
    let report = metrics::compute_miou(&reprojected, &gt, args.num_classes, args.ignore_class, mode)
        .map_err(invalid)?;
    let json = json!({
        "scan": scan.display().to_string(),
        "method": args.method,
        "points": inputs.cloud.len(),
        "k_ratio": k_ratio,
        "miou": report.miou,
        "per_class_iou": report.per_class_iou,
        "num_classes": args.num_classes,
        "ignore_class": args.ignore_class,
    });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(())
}

/// Demo scene: ground plane inside a walled room with a couple of objects.
fn builtin_scene() -> Scene {
    use rangekit::core::simulator::{Aabb, GroundPlane, Sphere};
    Scene {
        ground: Some(GroundPlane { z: -1.73, label: 9 }),
        spheres: vec![
            Sphere { center: Vec3::new(12.0, 3.0, 0.5), radius: 2.0, label: 1 },
            Sphere { center: Vec3::new(-9.0, -11.0, 0.8), radius: 3.0, label: 15 },
        ],
        boxes: vec![Aabb {
            min: Vec3::new(-45.0, -45.0, -2.0),
            max: Vec3::new(45.0, 45.0, 9.0),
            label: 13,
        }],
    }
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let scene = match &args.scene {
        Some(path) => io::read_scene(path)?,
        None => builtin_scene(),
    };
    let mut sensor: SensorModel = match args.sensor.as_str() {
        "kitti64" => simulator::make_kitti_like_sensor(),
        other => return Err(invalid(format!("unknown sensor preset {other:?}"))),
    };
    sensor.dropout_prob = args.dropout;
    if let Some(samples) = args.samples {
        sensor.samples_per_rev = samples;
    }
    let velocity = rangekit::core::motion::VelocityEstimate::new(
        rangekit::core::geometry::RotationVector::new(args.phi).map_err(invalid)?,
        args.v,
    )
    .map_err(invalid)?;
    let scan = simulator::simulate_scan(&sensor, &scene, &velocity, cli.seed).map_err(invalid)?;

    let prefix = cli.output_dir.join(&args.out_prefix);
    let raw_path = prefix.with_file_name(format!("{}_raw.bin", args.out_prefix));
    let deskewed_path = prefix.with_file_name(format!("{}_deskewed.bin", args.out_prefix));
    let label_path = prefix.with_file_name(format!("{}.label", args.out_prefix));
    let ring_path = prefix.with_file_name(format!("{}.ring", args.out_prefix));
    let alpha_path = prefix.with_file_name(format!("{}.alpha", args.out_prefix));
    io::write_scan(&raw_path, &scan.raw_cloud())?;
    io::write_scan(&deskewed_path, &scan.deskewed_cloud())?;
    io::write_labels(&label_path, &scan.labels)?;
    io::write_rings(&ring_path, &scan.rings)?;
    io::write_alphas(&alpha_path, &scan.alphas)?;

    let json = json!({
        "seed": cli.seed,
        "points": scan.len(),
        "lasers": sensor.num_lasers,
        "samples_per_rev": sensor.samples_per_rev,
        "dropout": sensor.dropout_prob,
        "phi": [args.phi.x, args.phi.y, args.phi.z],
        "v": [args.v.x, args.v.y, args.v.z],
        "raw": raw_path.display().to_string(),
        "deskewed": deskewed_path.display().to_string(),
        "labels": label_path.display().to_string(),
        "rings": ring_path.display().to_string(),
        "alphas": alpha_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(())
}

fn cmd_pipeline(cli: &Cli, args: &PipelineArgs) -> Result<(), CliError> {
    let ring_source = match args.ring_source.as_str() {
        "generate" => RingSource::Generate { threshold_deg: args.ring_threshold },
        "sidecar" | "file" => RingSource::Sidecar { path: args.rings.clone() },
        other => {
            return Err(invalid(format!(
                "unknown ring source {other:?} (expected generate or sidecar)"
            )))
        }
    };
    let alphas = if args.alpha_sidecar || args.alphas.is_some() {
        AlphaSource::Sidecar { path: args.alphas.clone() }
    } else {
        AlphaSource::AzimuthDerived
    };
    let method = match args.method.as_str() {
        "su++" | "su" => Method::ScanUnfolding,
        "sp" => Method::Spherical,
        other => return Err(invalid(format!("unknown method {other:?} (expected su++ or sp)"))),
    };
    let config = PipelineConfig {
        inputs: args.inputs.clone(),
        output_dir: cli.output_dir.clone(),
        ring_source,
        repair_rings: args.repair_rings,
        max_rings: args.max_rings,
        max_per_ring: args.max_per_ring,
        skew: args.poses.as_ref().map(|poses| SkewSettings {
            poses: poses.clone(),
            calib: args.calib.clone(),
            scan_index: args.scan_index,
        }),
        alphas,
        projector: ProjectorSettings {
            method,
            width: args.width,
            height: args.height,
            fov_up_deg: args.fov_up,
            fov_down_deg: args.fov_down,
        },
        knni: args.knni_k.map(|window| KnniSettings {
            window,
            variant: args.knni_variant.chars().next().unwrap_or('a'),
            wrap: args.knni_wrap,
        }),
        eval: args.eval.then(|| EvalSettings {
            labels: args.labels.clone(),
            num_classes: args.num_classes,
            ignore_class: args.ignore_class,
            all_classes_mean: args.all_classes_mean,
            remap_semantic_kitti: args.remap,
        }),
        threads: cli.threads,
        write_preview: args.preview,
    };
    let outcome = pipeline::run_pipeline(&config).map_err(|e| {
        let msg = e.to_string();
        match e.kind {
            pipeline::ErrorKind::Format => {
                CliError::Format(io::FormatError::Line {
                    path: PathBuf::from(e.input),
                    line: 0,
                    what: msg,
                })
            }
            pipeline::ErrorKind::InvalidArguments => CliError::Invalid(msg),
            pipeline::ErrorKind::Internal => CliError::Internal(msg),
        }
    })?;
    println!("pipeline: {} scan(s) processed", outcome.manifest.scans.len());
    for record in &outcome.manifest.scans {
        println!(
            "  {}: {} points, {:.2} ms (project {:.2} ms, knni {:.2} ms)",
            record.input,
            record.point_count,
            record.timings_ms.total,
            record.timings_ms.project,
            record.timings_ms.knni,
        );
    }
    println!("manifest: {}", outcome.manifest_path.display());
    Ok(())
}
