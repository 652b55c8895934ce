//! Evaluation quantities: per-coordinate skew MSE, kept-point ratio,
//! per-class IoU / mIoU, and the projection upper-bound procedure (project
//! the ground-truth labels, read them back through the look-up table, score
//! the round trip).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cloud::PointCloud;
use crate::projection::{self, ProjectionError, ProjectionResult, ProjectorConfig};
use crate::ring_index::RingAssignment;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// Compared clouds / label arrays must be index-aligned.
    LengthMismatch { expected: usize, got: usize },
    /// A label was outside `[0, num_classes)`.
    LabelOutOfRange { index: usize, label: u32 },
    /// `num_classes` must be at least one.
    NoClasses,
    Projection(ProjectionError),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            MetricsError::LabelOutOfRange { index, label } => {
                write!(f, "label {label} at index {index} out of range")
            }
            MetricsError::NoClasses => write!(f, "num_classes must be at least 1"),
            MetricsError::Projection(e) => write!(f, "projection failed: {e}"),
        }
    }
}

impl From<ProjectionError> for MetricsError {
    fn from(e: ProjectionError) -> Self {
        MetricsError::Projection(e)
    }
}

/// Compensated (Neumaier) accumulator so sums do not depend on how callers
/// chunk their data and stay reproducible to ~1e-12 regardless of length.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    #[inline]
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        self.compensation += if self.sum.abs() >= value.abs() {
            (self.sum - t) + value
        } else {
            (value - t) + self.sum
        };
        self.sum = t;
    }

    #[inline]
    fn total(self) -> f64 {
        self.sum + self.compensation
    }
}

/// Mean squared per-coordinate and per-range differences, meters².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewMse {
    pub mse_x: f64,
    pub mse_y: f64,
    pub mse_z: f64,
    pub mse_r: f64,
}

impl SkewMse {
    pub fn max_component(&self) -> f64 {
        self.mse_x.max(self.mse_y).max(self.mse_z).max(self.mse_r)
    }
}

/// MSE between two index-aligned clouds on x, y, z, and range
/// `r = √(x² + y² + z²)`. Symmetric in its arguments and deliberately
/// translation-sensitive — this scores reconstruction, not registration.
pub fn skew_mse(scan_a: &PointCloud, scan_b: &PointCloud) -> Result<SkewMse, MetricsError> {
    if scan_a.len() != scan_b.len() {
        return Err(MetricsError::LengthMismatch { expected: scan_a.len(), got: scan_b.len() });
    }
    let n = scan_a.len().max(1) as f64;
    let mut sums = [KahanSum::default(); 4];
    for (a, b) in scan_a.positions().iter().zip(scan_b.positions()) {
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dz = a.z - b.z;
        let dr = a.norm() - b.norm();
        sums[0].add(dx * dx);
        sums[1].add(dy * dy);
        sums[2].add(dz * dz);
        sums[3].add(dr * dr);
    }
    Ok(SkewMse {
        mse_x: sums[0].total() / n,
        mse_y: sums[1].total() / n,
        mse_z: sums[2].total() / n,
        mse_r: sums[3].total() / n,
    })
}

/// Fraction of input points that survived projection: `M / N`.
pub fn kept_ratio(result: &ProjectionResult, n_total: usize) -> f64 {
    assert!(n_total >= 1, "kept_ratio needs at least one point");
    result.kept_count as f64 / n_total as f64
}

/// How the mean over classes treats classes absent from both prediction and
/// ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanMode {
    /// Benchmark convention: absent classes are excluded from the mean.
    #[default]
    ExcludeAbsent,
    /// Divide by the full class count; absent classes contribute zero.
    AllClasses,
}

/// C×C confusion counts; rows are ground truth, columns predictions.
/// Points whose ground-truth label equals the ignore class are dropped
/// before accumulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    num_classes: usize,
    ignore_class: Option<u32>,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize, ignore_class: Option<u32>) -> Result<Self, MetricsError> {
        if num_classes == 0 {
            return Err(MetricsError::NoClasses);
        }
        Ok(ConfusionMatrix {
            counts: vec![0; num_classes * num_classes],
            num_classes,
            ignore_class,
        })
    }

    pub fn accumulate(&mut self, pred: &[u32], gt: &[u32]) -> Result<(), MetricsError> {
        if pred.len() != gt.len() {
            return Err(MetricsError::LengthMismatch { expected: gt.len(), got: pred.len() });
        }
        for (index, (&p, &g)) in pred.iter().zip(gt).enumerate() {
            if Some(g) == self.ignore_class {
                continue;
            }
            if g as usize >= self.num_classes {
                return Err(MetricsError::LabelOutOfRange { index, label: g });
            }
            if p as usize >= self.num_classes {
                return Err(MetricsError::LabelOutOfRange { index, label: p });
            }
            self.counts[g as usize * self.num_classes + p as usize] += 1;
        }
        Ok(())
    }

    /// Add another matrix's counts (parallel partial results merge here).
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<(), MetricsError> {
        if other.num_classes != self.num_classes {
            return Err(MetricsError::LengthMismatch {
                expected: self.num_classes,
                got: other.num_classes,
            });
        }
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            *mine += theirs;
        }
        Ok(())
    }

    /// Total evaluated (non-ignored) points.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    #[inline]
    fn at(&self, gt: usize, pred: usize) -> u64 {
        self.counts[gt * self.num_classes + pred]
    }

    /// Per-class IoU = TP / (TP + FP + FN); classes with an empty
    /// denominator are undefined. The ignore class never gets a score.
    pub fn iou_report(&self, mode: MeanMode) -> IouReport {
        let c = self.num_classes;
        let mut per_class_iou = vec![None; c];
        for class in 0..c {
            if Some(class as u32) == self.ignore_class {
                continue;
            }
            let tp = self.at(class, class);
            let fp: u64 = (0..c)
                .filter(|&g| g != class)
                .map(|g| self.at(g, class))
                .sum();
            let fn_: u64 = (0..c)
                .filter(|&p| p != class)
                .map(|p| self.at(class, p))
                .sum();
            let denom = tp + fp + fn_;
            if denom > 0 {
                per_class_iou[class] = Some(tp as f64 / denom as f64);
            }
        }
        let defined: Vec<f64> = per_class_iou.iter().flatten().copied().collect();
        let class_count = match mode {
            MeanMode::ExcludeAbsent => defined.len(),
            MeanMode::AllClasses => c - usize::from(self.ignore_class.is_some_and(|i| (i as usize) < c)),
        };
        let miou = if class_count == 0 {
            0.0
        } else {
            defined.iter().sum::<f64>() / class_count as f64
        };
        IouReport { per_class_iou, miou, k_ratio: None }
    }
}

/// Per-class intersection-over-union scores plus their mean; `None` marks a
/// class absent from both prediction and ground truth (or the ignore class).
#[derive(Debug, Clone, PartialEq)]
pub struct IouReport {
    pub per_class_iou: Vec<Option<f64>>,
    pub miou: f64,
    pub k_ratio: Option<f64>,
}

/// Score a prediction against ground truth.
pub fn compute_miou(
    pred: &[u32],
    gt: &[u32],
    num_classes: usize,
    ignore_class: Option<u32>,
    mode: MeanMode,
) -> Result<IouReport, MetricsError> {
    let mut confusion = ConfusionMatrix::new(num_classes, ignore_class)?;
    confusion.accumulate(pred, gt)?;
    Ok(confusion.iou_report(mode))
}

/// Upper bound of segmentation quality under a projection: project the
/// ground-truth labels onto the image, read them back through the look-up
/// table, and score the reprojected labels against the originals. The
/// report carries the kept-point ratio of the same projection.
#[allow(clippy::too_many_arguments)]
pub fn upper_bound_miou(
    cloud: &PointCloud,
    gt_labels: &[u32],
    projector: &ProjectorConfig,
    rings: Option<&RingAssignment>,
    num_classes: usize,
    ignore_class: Option<u32>,
    mode: MeanMode,
) -> Result<IouReport, MetricsError> {
    if gt_labels.len() != cloud.len() {
        return Err(MetricsError::LengthMismatch {
            expected: cloud.len(),
            got: gt_labels.len(),
        });
    }
    let labeled = cloud
        .clone()
        .with_labels(gt_labels.to_vec())
        .expect("length checked above");
    let result = projection::project(&labeled, projector, rings)?;
    let reprojected = projection::unproject_labels(&result.image, &result.lut)?;
    let mut report = compute_miou(&reprojected, gt_labels, num_classes, ignore_class, mode)?;
    report.k_ratio = Some(kept_ratio(&result, cloud.len()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud_of(points: Vec<Vec3>) -> PointCloud {
        PointCloud::from_positions(points)
    }

    #[test]
    fn identical_clouds_have_zero_mse() {
        let a = cloud_of(vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(-4.0, 0.5, 2.0)]);
        let mse = skew_mse(&a, &a).unwrap();
        assert_eq!(mse, SkewMse { mse_x: 0.0, mse_y: 0.0, mse_z: 0.0, mse_r: 0.0 });
    }

    #[test]
    fn constant_x_offset_yields_its_square() {
        let a = cloud_of(vec![Vec3::new(1.0, 0.0, 0.0); 100]);
        let b = cloud_of(vec![Vec3::new(1.01, 0.0, 0.0); 100]);
        let mse = skew_mse(&a, &b).unwrap();
        assert!((mse.mse_x - 1e-4).abs() < 1e-15);
        assert_eq!(mse.mse_y, 0.0);
        assert_eq!(mse.mse_z, 0.0);
        // The offset is along the range direction here.
        assert!((mse.mse_r - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn mse_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = cloud_of(
            (0..500)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-50.0..50.0),
                        rng.gen_range(-50.0..50.0),
                        rng.gen_range(-3.0..3.0),
                    )
                })
                .collect(),
        );
        let b = cloud_of(
            (0..500)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-50.0..50.0),
                        rng.gen_range(-50.0..50.0),
                        rng.gen_range(-3.0..3.0),
                    )
                })
                .collect(),
        );
        let ab = skew_mse(&a, &b).unwrap();
        let ba = skew_mse(&b, &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn mse_rejects_count_mismatch() {
        let a = cloud_of(vec![Vec3::ZERO; 2]);
        let b = cloud_of(vec![Vec3::ZERO; 3]);
        assert!(matches!(
            skew_mse(&a, &b),
            Err(MetricsError::LengthMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn hand_filled_confusion_case() {
        // gt = [0,0,1,1], pred = [0,1,1,1]:
        // IoU₀ = 1/2, IoU₁ = 2/3, mIoU = 7/12.
        let report =
            compute_miou(&[0, 1, 1, 1], &[0, 0, 1, 1], 2, None, MeanMode::ExcludeAbsent).unwrap();
        assert_eq!(report.per_class_iou[0], Some(0.5));
        assert!((report.per_class_iou[1].unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((report.miou - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let labels: Vec<u32> = (0..200).map(|_| rng.gen_range(0..7)).collect();
            let report = compute_miou(&labels, &labels, 7, None, MeanMode::ExcludeAbsent).unwrap();
            assert_eq!(report.miou, 1.0);
            for (class, iou) in report.per_class_iou.iter().enumerate() {
                let present = labels.contains(&(class as u32));
                assert_eq!(iou.is_some(), present);
                if present {
                    assert_eq!(*iou, Some(1.0));
                }
            }
        }
    }

    #[test]
    fn absent_classes_are_undefined_and_mode_controls_the_mean() {
        // Class 2 never occurs.
        let gt = [0, 0, 1, 1];
        let pred = [0, 0, 1, 1];
        let excl = compute_miou(&pred, &gt, 3, None, MeanMode::ExcludeAbsent).unwrap();
        assert_eq!(excl.per_class_iou[2], None);
        assert_eq!(excl.miou, 1.0);
        let all = compute_miou(&pred, &gt, 3, None, MeanMode::AllClasses).unwrap();
        assert!((all.miou - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ignore_class_points_do_not_count() {
        // Ground-truth zeros are ignored entirely, even when mispredicted.
        let gt = [0, 0, 1, 2];
        let pred = [1, 2, 1, 2];
        let report = compute_miou(&pred, &gt, 3, Some(0), MeanMode::ExcludeAbsent).unwrap();
        assert_eq!(report.per_class_iou[0], None);
        assert_eq!(report.per_class_iou[1], Some(1.0));
        assert_eq!(report.per_class_iou[2], Some(1.0));
        assert_eq!(report.miou, 1.0);
        // Predicting the ignore class on a real point is still a miss.
        let report =
            compute_miou(&[0, 0, 0, 2], &gt, 3, Some(0), MeanMode::ExcludeAbsent).unwrap();
        assert_eq!(report.per_class_iou[1], Some(0.0));
    }

    #[test]
    fn miou_is_invariant_under_class_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let gt: Vec<u32> = (0..300).map(|_| rng.gen_range(0..5)).collect();
        let pred: Vec<u32> = gt
            .iter()
            .map(|&g| if rng.gen_bool(0.2) { rng.gen_range(0..5) } else { g })
            .collect();
        let base = compute_miou(&pred, &gt, 5, None, MeanMode::ExcludeAbsent).unwrap();
        let perm = [3u32, 0, 4, 1, 2];
        let gt_p: Vec<u32> = gt.iter().map(|&g| perm[g as usize]).collect();
        let pred_p: Vec<u32> = pred.iter().map(|&p| perm[p as usize]).collect();
        let permuted = compute_miou(&pred_p, &gt_p, 5, None, MeanMode::ExcludeAbsent).unwrap();
        assert!((base.miou - permuted.miou).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_labels_are_rejected() {
        assert!(matches!(
            compute_miou(&[0, 9], &[0, 1], 2, None, MeanMode::ExcludeAbsent),
            Err(MetricsError::LabelOutOfRange { index: 1, label: 9 })
        ));
        assert!(matches!(
            compute_miou(&[0], &[7], 2, None, MeanMode::ExcludeAbsent),
            Err(MetricsError::LabelOutOfRange { index: 0, label: 7 })
        ));
    }

    #[test]
    fn merged_matrices_equal_single_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let gt: Vec<u32> = (0..400).map(|_| rng.gen_range(0..6)).collect();
        let pred: Vec<u32> = (0..400).map(|_| rng.gen_range(0..6)).collect();
        let mut whole = ConfusionMatrix::new(6, Some(0)).unwrap();
        whole.accumulate(&pred, &gt).unwrap();
        let mut left = ConfusionMatrix::new(6, Some(0)).unwrap();
        left.accumulate(&pred[..137], &gt[..137]).unwrap();
        let mut right = ConfusionMatrix::new(6, Some(0)).unwrap();
        right.accumulate(&pred[137..], &gt[137..]).unwrap();
        left.merge(&right).unwrap();
        assert_eq!(left, whole);
    }

    #[test]
    fn upper_bound_composition_matches_the_direct_route() {
        // Collision-prone cloud: two rings, many shared columns.
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let mut positions = Vec::new();
        let mut rings = Vec::new();
        for ring in 0..2u16 {
            for i in 0..128 {
                let az = (i as f64 + rng.gen_range(0.0..0.9)) * (360.0 / 64.0) % 360.0;
                let rad = az.to_radians();
                let r = rng.gen_range(2.0..60.0);
                positions.push(Vec3::new(r * rad.cos(), r * rad.sin(), 0.1 * ring as f64));
                rings.push(ring);
            }
        }
        let labels: Vec<u32> = (0..positions.len()).map(|_| rng.gen_range(0..4)).collect();
        let cloud = PointCloud::from_positions(positions);
        let assignment = RingAssignment::from_rings(rings);
        let config = ProjectorConfig::ScanUnfolding { width: 64, height: None };

        let report = upper_bound_miou(
            &cloud,
            &labels,
            &config,
            Some(&assignment),
            4,
            None,
            MeanMode::ExcludeAbsent,
        )
        .unwrap();

        // Direct route: project with labels, unproject, score.
        let labeled = cloud.clone().with_labels(labels.clone()).unwrap();
        let r = projection::project(&labeled, &config, Some(&assignment)).unwrap();
        let back = projection::unproject_labels(&r.image, &r.lut).unwrap();
        let direct = compute_miou(&back, &labels, 4, None, MeanMode::ExcludeAbsent).unwrap();

        assert_eq!(report.miou, direct.miou);
        assert_eq!(report.per_class_iou, direct.per_class_iou);
        assert!(report.miou < 1.0); // collisions force information loss
        assert_eq!(report.k_ratio, Some(r.kept_count as f64 / cloud.len() as f64));
    }

    #[test]
    fn kept_ratio_is_m_over_n() {
        let cloud = PointCloud::from_positions(vec![
            Vec3::new(5.0, 0.0, 0.0),
            Vec3::new(5.0, 1e-4, 0.0),
        ]);
        let assignment = RingAssignment::from_rings(vec![0, 0]);
        let config = ProjectorConfig::ScanUnfolding { width: 4, height: None };
        let r = projection::project(&cloud, &config, Some(&assignment)).unwrap();
        assert_eq!(r.kept_count, 1);
        assert_eq!(kept_ratio(&r, 2), 0.5);
    }
}
