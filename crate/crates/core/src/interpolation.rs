//! Hole filling and label post-processing on range images.
//!
//! KNNI works strictly row-wise: horizontal angular resolution is finer than
//! vertical, so a pixel's horizontal neighbors are its closest points in
//! space. An invalid pixel is filled from the valid neighbors within a
//! window of `K` pixels centered on it; only originally-valid pixels are
//! read, so fills never cascade within one pass.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::projection::{LookUpTable, RangeImage};

#[derive(Debug, Clone, PartialEq)]
pub enum InterpolationError {
    /// The window size must be odd so the pixel sits at its center.
    EvenWindow(usize),
    /// The window must span at least one neighbor on each side.
    WindowTooSmall(usize),
    /// Point ranges must align with the look-up table.
    LengthMismatch { expected: usize, got: usize },
    /// A look-up table entry points outside the image.
    CorruptedLut { entry: usize },
    MissingLabelChannel,
}

impl fmt::Display for InterpolationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterpolationError::EvenWindow(k) => write!(f, "window size {k} must be odd"),
            InterpolationError::WindowTooSmall(k) => {
                write!(f, "window size {k} must be at least 3")
            }
            InterpolationError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} point ranges, got {got}")
            }
            InterpolationError::CorruptedLut { entry } => {
                write!(f, "corrupted look-up table at entry {entry}")
            }
            InterpolationError::MissingLabelChannel => write!(f, "image has no label channel"),
        }
    }
}

/// How a filled pixel's values and label are chosen.
///
/// * `A` — full copy of the valid neighbor with the smallest range.
/// * `B` — value channels become the mean over all valid neighbors in the
///   window; the label still comes from the smallest-range neighbor.
/// * `C` — values as in `A`, but the label becomes the ignored class when
///   the nearest valid left and right neighbors disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnniVariant {
    A,
    B,
    C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnniConfig {
    /// Window size `K` (odd, ≥ 3): the pixel plus `⌊K/2⌋` neighbors per side.
    pub window: usize,
    pub variant: KnniVariant,
    /// Treat each row as a cycle (a rotating sensor's row is topologically a
    /// circle). Off by default.
    pub wrap: bool,
    /// Label written by variant `C` on left/right disagreement.
    pub ignored_label: u32,
}

impl KnniConfig {
    pub fn new(window: usize, variant: KnniVariant) -> Result<Self, InterpolationError> {
        check_window(window)?;
        Ok(KnniConfig { window, variant, wrap: false, ignored_label: 0 })
    }

    pub fn with_wrap(mut self, wrap: bool) -> Self {
        self.wrap = wrap;
        self
    }

    pub fn with_ignored_label(mut self, label: u32) -> Self {
        self.ignored_label = label;
        self
    }
}

fn check_window(window: usize) -> Result<(), InterpolationError> {
    if window % 2 == 0 {
        return Err(InterpolationError::EvenWindow(window));
    }
    if window < 3 {
        return Err(InterpolationError::WindowTooSmall(window));
    }
    Ok(())
}

/// What one KNNI pass did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillReport {
    pub filled_count: usize,
    pub remaining_invalid: usize,
    /// Pixels variant `C` demoted to the ignored label (always 0 for A/B).
    pub ignored_label_count: usize,
}

/// Neighbor column for offset `s`, honoring the wrap setting.
#[inline]
fn neighbor_column(u: usize, s: i64, width: usize, wrap: bool) -> Option<usize> {
    let raw = u as i64 + s;
    if wrap {
        Some(raw.rem_euclid(width as i64) as usize)
    } else if (0..width as i64).contains(&raw) {
        Some(raw as usize)
    } else {
        None
    }
}

/// Fill invalid pixels row-wise from their valid horizontal neighbors.
///
/// Neighbors are scanned in ascending offset order (`−⌊K/2⌋ … −1, 1 … ⌊K/2⌋`);
/// among equal ranges the first one scanned wins, which for the classic
/// K = 3 case means the left neighbor. Originally-valid pixels are never
/// modified, and filled pixels carry a provenance bit in the `filled`
/// channel.
pub fn knni(
    image: &RangeImage,
    config: &KnniConfig,
) -> Result<(RangeImage, FillReport), InterpolationError> {
    check_window(config.window)?;
    let half = (config.window / 2) as i64;
    let (height, width) = (image.height, image.width);
    let mut out = image.clone();
    let mut filled_count = 0usize;
    let mut ignored_label_count = 0usize;
    let mut initial_invalid = 0usize;

    for v in 0..height {
        let row = v * width;
        for u in 0..width {
            if image.mask[row + u] == 1 {
                continue;
            }
            initial_invalid += 1;

            // Smallest-range valid neighbor, plus running means for B.
            let mut best: Option<(f64, usize)> = None;
            let mut sum = [0.0f64; 5];
            let mut valid_neighbors = 0usize;
            for s in -half..=half {
                if s == 0 {
                    continue;
                }
                let Some(uu) = neighbor_column(u, s, width, config.wrap) else {
                    continue;
                };
                let pixel = row + uu;
                if image.mask[pixel] != 1 {
                    continue;
                }
                let r = image.range[pixel];
                if best.is_none_or(|(br, _)| r < br) {
                    best = Some((r, pixel));
                }
                sum[0] += r;
                sum[1] += image.x[pixel];
                sum[2] += image.y[pixel];
                sum[3] += image.z[pixel];
                sum[4] += image.intensity[pixel];
                valid_neighbors += 1;
            }
            let Some((_, source)) = best else {
                continue;
            };

            let pixel = row + u;
            match config.variant {
                KnniVariant::A | KnniVariant::C => {
                    out.range[pixel] = image.range[source];
                    out.x[pixel] = image.x[source];
                    out.y[pixel] = image.y[source];
                    out.z[pixel] = image.z[source];
                    out.intensity[pixel] = image.intensity[source];
                }
                KnniVariant::B => {
                    let inv = 1.0 / valid_neighbors as f64;
                    out.range[pixel] = sum[0] * inv;
                    out.x[pixel] = sum[1] * inv;
                    out.y[pixel] = sum[2] * inv;
                    out.z[pixel] = sum[3] * inv;
                    out.intensity[pixel] = sum[4] * inv;
                }
            }
            if let Some(labels) = out.label.as_mut() {
                let source_label = image.label.as_ref().map(|l| l[source]).unwrap_or(0);
                labels[pixel] = source_label;
                if config.variant == KnniVariant::C {
                    let nearest = |dir: i64| {
                        (1..=half).find_map(|step| {
                            let uu = neighbor_column(u, dir * step, width, config.wrap)?;
                            (image.mask[row + uu] == 1)
                                .then(|| image.label.as_ref().unwrap()[row + uu])
                        })
                    };
                    // A side with no valid neighbor does not veto.
                    if let (Some(left), Some(right)) = (nearest(-1), nearest(1)) {
                        if left != right {
                            labels[pixel] = config.ignored_label;
                            ignored_label_count += 1;
                        }
                    }
                }
            }
            out.mask[pixel] = 1;
            out.filled[pixel] = 1;
            filled_count += 1;
        }
    }

    let report = FillReport {
        filled_count,
        remaining_invalid: initial_invalid - filled_count,
        ignored_label_count,
    };
    Ok((out, report))
}

/// Nearest-label assignment: each point takes the label of the valid pixel
/// in the `window`×`window` neighborhood of its look-up entry whose range is
/// closest to the point's own range, falling back to its own pixel's label
/// when the neighborhood holds no valid pixel.
///
/// This undoes most occlusion damage: a point hidden behind a nearer return
/// finds its own surface in an adjacent pixel instead of inheriting the
/// occluder's label.
pub fn nla_postprocess(
    point_ranges: &[f64],
    lut: &LookUpTable,
    image: &RangeImage,
    window: usize,
) -> Result<Vec<u32>, InterpolationError> {
    if window % 2 == 0 {
        return Err(InterpolationError::EvenWindow(window));
    }
    if point_ranges.len() != lut.len() {
        return Err(InterpolationError::LengthMismatch {
            expected: lut.len(),
            got: point_ranges.len(),
        });
    }
    let labels = image.label.as_ref().ok_or(InterpolationError::MissingLabelChannel)?;
    let half = (window / 2) as i64;
    let (height, width) = (image.height as i64, image.width as i64);

    let mut out = vec![0u32; lut.len()];
    for entry in 0..lut.len() {
        let point = lut.point_index[entry] as usize;
        let (v, u) = (lut.v[entry] as i64, lut.u[entry] as i64);
        if point >= out.len() || v >= height || u >= width {
            return Err(InterpolationError::CorruptedLut { entry });
        }
        let target = point_ranges[point];
        let mut best: Option<(f64, u32)> = None;
        for dv in -half..=half {
            let vv = v + dv;
            if !(0..height).contains(&vv) {
                continue;
            }
            for du in -half..=half {
                let uu = u + du;
                if !(0..width).contains(&uu) {
                    continue;
                }
                let pixel = (vv * width + uu) as usize;
                if image.mask[pixel] != 1 {
                    continue;
                }
                let d = (image.range[pixel] - target).abs();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, labels[pixel]));
                }
            }
        }
        out[point] = match best {
            Some((_, label)) => label,
            None => labels[(v * width + u) as usize],
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::projection::{project_scan_unfolding, unproject_labels};
    use crate::ring_index::RingAssignment;
    use crate::cloud::PointCloud;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Build an image whose valid pixels are real points (range consistent
    /// with coordinates).
    fn image_from_ranges(rows: &[&[Option<f64>]]) -> RangeImage {
        let height = rows.len();
        let width = rows[0].len();
        let mut img = RangeImage::empty(height, width, true);
        for (v, row) in rows.iter().enumerate() {
            for (u, cell) in row.iter().enumerate() {
                if let Some(r) = cell {
                    let i = img.idx(v, u);
                    img.range[i] = *r;
                    img.x[i] = *r;
                    img.mask[i] = 1;
                    img.intensity[i] = 0.5;
                    img.label.as_mut().unwrap()[i] = (10 + v * width + u) as u32;
                }
            }
        }
        img
    }

    #[test]
    fn fig5_case_k3_fills_from_the_smaller_range() {
        // p3 valid, p4 invalid, p5 valid; r(p3) ≤ r(p5) picks p3.
        let img = image_from_ranges(&[&[Some(4.0), None, Some(6.0)]]);
        let cfg = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(report.filled_count, 1);
        assert_eq!(out.range[1], 4.0);
        assert_eq!(out.label.as_ref().unwrap()[1], 10);
        assert_eq!(out.filled[1], 1);

        // Ties also pick the left neighbor.
        let img = image_from_ranges(&[&[Some(5.0), None, Some(5.0)]]);
        let (out, _) = knni(&img, &cfg).unwrap();
        assert_eq!(out.label.as_ref().unwrap()[1], 10);

        // A nearer right neighbor wins.
        let img = image_from_ranges(&[&[Some(6.0), None, Some(4.0)]]);
        let (out, _) = knni(&img, &cfg).unwrap();
        assert_eq!(out.range[1], 4.0);
        assert_eq!(out.label.as_ref().unwrap()[1], 12);
    }

    #[test]
    fn fully_valid_image_is_unchanged() {
        let img = image_from_ranges(&[&[Some(1.0), Some(2.0), Some(3.0)]]);
        let cfg = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(out, img);
        assert_eq!(report, FillReport {
            filled_count: 0,
            remaining_invalid: 0,
            ignored_label_count: 0,
        });
    }

    #[test]
    fn valid_pixels_are_never_modified() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut img = RangeImage::empty(8, 32, true);
        for i in 0..img.pixel_count() {
            if rng.gen_bool(0.6) {
                img.mask[i] = 1;
                img.range[i] = rng.gen_range(1.0..50.0);
                img.x[i] = img.range[i];
                img.label.as_mut().unwrap()[i] = rng.gen_range(0..5);
            }
        }
        for variant in [KnniVariant::A, KnniVariant::B, KnniVariant::C] {
            let cfg = KnniConfig::new(5, variant).unwrap();
            let (out, _) = knni(&img, &cfg).unwrap();
            for i in 0..img.pixel_count() {
                if img.mask[i] == 1 {
                    assert_eq!(out.range[i].to_bits(), img.range[i].to_bits());
                    assert_eq!(out.x[i].to_bits(), img.x[i].to_bits());
                    assert_eq!(out.label.as_ref().unwrap()[i], img.label.as_ref().unwrap()[i]);
                    assert_eq!(out.filled[i], 0);
                }
            }
        }
    }

    #[test]
    fn fills_do_not_cascade_within_a_pass() {
        // Two adjacent holes: each sees only the original valid pixels, so
        // the second hole must not read the first hole's fresh fill.
        let img = image_from_ranges(&[&[Some(4.0), None, None, Some(9.0)]]);
        let cfg = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(out.range[1], 4.0);
        assert_eq!(out.range[2], 9.0);
        assert_eq!(report.filled_count, 2);
        assert_eq!(report.remaining_invalid, 0);
    }

    #[test]
    fn unreachable_holes_stay_invalid_and_are_counted() {
        let img = image_from_ranges(&[&[Some(4.0), None, None, None, None]]);
        let cfg = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(report.filled_count, 1);
        assert_eq!(report.remaining_invalid, 3);
        assert_eq!(out.mask[2..], [0, 0, 0]);
    }

    #[test]
    fn second_pass_extends_reach_and_is_otherwise_idempotent() {
        let img = image_from_ranges(&[&[Some(4.0), None, None, None, None]]);
        let cfg = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (once, _) = knni(&img, &cfg).unwrap();
        let (twice, report2) = knni(&once, &cfg).unwrap();
        assert_eq!(report2.filled_count, 1); // the next hole over
        assert_eq!(twice.range[2], 4.0);

        // When every hole is reachable in one pass, a second pass is a no-op.
        let dense = image_from_ranges(&[&[Some(4.0), None, Some(6.0), None, Some(2.0)]]);
        let (once, _) = knni(&dense, &cfg).unwrap();
        let (twice, report) = knni(&once, &cfg).unwrap();
        assert_eq!(report.filled_count, 0);
        assert_eq!(once, twice);
    }

    #[test]
    fn filled_count_is_monotone_in_window_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut img = RangeImage::empty(4, 64, false);
        for i in 0..img.pixel_count() {
            if rng.gen_bool(0.4) {
                img.mask[i] = 1;
                img.range[i] = rng.gen_range(1.0..50.0);
                img.x[i] = img.range[i];
            }
        }
        let mut last = 0usize;
        for k in [3usize, 5, 7, 9, 11] {
            let cfg = KnniConfig::new(k, KnniVariant::A).unwrap();
            let (_, report) = knni(&img, &cfg).unwrap();
            assert!(report.filled_count >= last);
            last = report.filled_count;
        }
    }

    #[test]
    fn variant_b_takes_the_mean_and_the_min_range_label() {
        let img = image_from_ranges(&[&[Some(4.0), None, Some(6.0)]]);
        let cfg = KnniConfig::new(3, KnniVariant::B).unwrap();
        let (out, _) = knni(&img, &cfg).unwrap();
        assert!((out.range[1] - 5.0).abs() < 1e-12);
        assert!((out.x[1] - 5.0).abs() < 1e-12);
        assert_eq!(out.label.as_ref().unwrap()[1], 10);
    }

    #[test]
    fn variant_c_ignores_disagreeing_boundaries() {
        let mut img = image_from_ranges(&[&[Some(4.0), None, Some(6.0)]]);
        img.label.as_mut().unwrap()[0] = 7;
        img.label.as_mut().unwrap()[2] = 9;
        let cfg = KnniConfig::new(3, KnniVariant::C)
            .unwrap()
            .with_ignored_label(42);
        let (out, report) = knni(&img, &cfg).unwrap();
        // Values still copied from the nearer neighbor.
        assert_eq!(out.range[1], 4.0);
        assert_eq!(out.label.as_ref().unwrap()[1], 42);
        assert_eq!(report.ignored_label_count, 1);

        // Agreeing sides keep the copied label.
        let mut img = image_from_ranges(&[&[Some(4.0), None, Some(6.0)]]);
        img.label.as_mut().unwrap()[0] = 7;
        img.label.as_mut().unwrap()[2] = 7;
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(out.label.as_ref().unwrap()[1], 7);
        assert_eq!(report.ignored_label_count, 0);

        // A missing side does not veto.
        let img = image_from_ranges(&[&[None, Some(3.0), None]]);
        let (out, report) = knni(&img, &cfg).unwrap();
        assert_eq!(out.label.as_ref().unwrap()[0], 11);
        assert_eq!(out.label.as_ref().unwrap()[2], 11);
        assert_eq!(report.ignored_label_count, 0);
    }

    #[test]
    fn wrap_mode_reaches_across_the_seam() {
        let img = image_from_ranges(&[&[None, Some(5.0), Some(3.0)]]);
        let no_wrap = KnniConfig::new(3, KnniVariant::A).unwrap();
        let (out, _) = knni(&img, &no_wrap).unwrap();
        assert_eq!(out.range[0], 5.0); // only the right neighbor is visible

        let wrap = KnniConfig::new(3, KnniVariant::A).unwrap().with_wrap(true);
        let (out, _) = knni(&img, &wrap).unwrap();
        assert_eq!(out.range[0], 3.0); // the seam neighbor is nearer
    }

    #[test]
    fn even_or_tiny_windows_are_rejected() {
        assert!(matches!(
            KnniConfig::new(4, KnniVariant::A),
            Err(InterpolationError::EvenWindow(4))
        ));
        assert!(matches!(
            KnniConfig::new(1, KnniVariant::A),
            Err(InterpolationError::WindowTooSmall(1))
        ));
        let img = image_from_ranges(&[&[Some(1.0)]]);
        let bad = KnniConfig { window: 6, variant: KnniVariant::A, wrap: false, ignored_label: 0 };
        assert!(knni(&img, &bad).is_err());
    }

    #[test]
    fn matches_a_brute_force_window_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut img = RangeImage::empty(16, 64, true);
        for i in 0..img.pixel_count() {
            if rng.gen_bool(0.7) {
                img.mask[i] = 1;
                img.range[i] = rng.gen_range(1.0..80.0);
                img.x[i] = img.range[i];
                img.intensity[i] = rng.gen_range(0.0..1.0);
                img.label.as_mut().unwrap()[i] = rng.gen_range(0..19);
            }
        }
        for k in [3usize, 5, 7] {
            let cfg = KnniConfig::new(k, KnniVariant::A).unwrap();
            let (out, _) = knni(&img, &cfg).unwrap();
            let half = (k / 2) as i64;
            for v in 0..img.height {
                for u in 0..img.width {
                    let i = img.idx(v, u);
                    if img.mask[i] == 1 {
                        continue;
                    }
                    // Straightforward scan of the window.
                    let mut best: Option<usize> = None;
                    for s in -half..=half {
                        if s == 0 {
                            continue;
                        }
                        let uu = u as i64 + s;
                        if !(0..img.width as i64).contains(&uu) {
                            continue;
                        }
                        let j = img.idx(v, uu as usize);
                        if img.mask[j] == 1
                            && best.is_none_or(|b| img.range[j] < img.range[b])
                        {
                            best = Some(j);
                        }
                    }
                    match best {
                        None => assert_eq!(out.mask[i], 0),
                        Some(j) => {
                            assert_eq!(out.mask[i], 1);
                            assert_eq!(out.range[i].to_bits(), img.range[j].to_bits());
                            assert_eq!(
                                out.label.as_ref().unwrap()[i],
                                img.label.as_ref().unwrap()[j]
                            );
                        }
                    }
                }
            }
        }
    }

    fn occlusion_setup() -> (PointCloud, RingAssignment) {
        let near = Vec3::new(3.0, 0.0, 0.0);
        let far = Vec3::new(7.0, 0.0, 0.0);
        let beside = {
            let rad = 1.5f64.to_radians();
            Vec3::new(7.05 * rad.cos(), 7.05 * rad.sin(), 0.0)
        };
        let cloud = PointCloud::from_positions(vec![far, near, beside])
            .with_labels(vec![5, 8, 5])
            .unwrap();
        (cloud, RingAssignment::from_rings(vec![0, 0, 0]))
    }

    #[test]
    fn window_one_nla_equals_unprojection() {
        let positions = vec![
            Vec3::new(5.0, 0.0, 0.0),
            Vec3::new(0.0, 6.0, 0.0),
            Vec3::new(-7.0, 0.0, 0.0),
        ];
        let cloud = PointCloud::from_positions(positions)
            .with_labels(vec![1, 2, 3])
            .unwrap();
        let rings = RingAssignment::from_rings(vec![0, 0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 8, None).unwrap();
        let ranges: Vec<f64> = cloud.positions().iter().map(|p| p.norm()).collect();
        let nla = nla_postprocess(&ranges, &r.lut, &r.image, 1).unwrap();
        assert_eq!(nla, unproject_labels(&r.image, &r.lut).unwrap());
    }

    #[test]
    fn occluded_point_recovers_its_label_from_a_neighbor() {
        // Points 0 (far, label 5) and 1 (near, label 8) collide; point 2
        // (label 5, nearly the same range as point 0) sits one column over.
        let (cloud, rings) = occlusion_setup();
        let r = project_scan_unfolding(&cloud, &rings, 240, None).unwrap();
        assert_eq!(r.lut.u[0], r.lut.u[1]);
        assert_ne!(r.lut.u[0], r.lut.u[2]);
        let back = unproject_labels(&r.image, &r.lut).unwrap();
        assert_eq!(back[0], 8); // plain unprojection keeps the occluder's label
        let ranges: Vec<f64> = cloud.positions().iter().map(|p| p.norm()).collect();
        let nla = nla_postprocess(&ranges, &r.lut, &r.image, 7).unwrap();
        assert_eq!(nla[0], 5); // the adjacent pixel's range matches better
        assert_eq!(nla[1], 8);
    }

    #[test]
    fn all_invalid_neighborhood_falls_back_to_the_own_pixel() {
        let mut img = RangeImage::empty(1, 4, true);
        img.label.as_mut().unwrap()[2] = 77;
        let lut = LookUpTable { point_index: vec![0], v: vec![0], u: vec![2] };
        let nla = nla_postprocess(&[5.0], &lut, &img, 3).unwrap();
        assert_eq!(nla, vec![77]);
    }

    #[test]
    fn nla_rejects_bad_inputs() {
        let img = RangeImage::empty(2, 2, true);
        let lut = LookUpTable { point_index: vec![0], v: vec![0], u: vec![0] };
        assert!(matches!(
            nla_postprocess(&[1.0], &lut, &img, 4),
            Err(InterpolationError::EvenWindow(4))
        ));
        assert!(matches!(
            nla_postprocess(&[1.0, 2.0], &lut, &img, 3),
            Err(InterpolationError::LengthMismatch { .. })
        ));
        let bad_lut = LookUpTable { point_index: vec![0], v: vec![5], u: vec![0] };
        assert!(matches!(
            nla_postprocess(&[1.0], &bad_lut, &img, 3),
            Err(InterpolationError::CorruptedLut { entry: 0 })
        ));
        let unlabeled = RangeImage::empty(2, 2, false);
        assert!(matches!(
            nla_postprocess(&[1.0], &lut, &unlabeled, 3),
            Err(InterpolationError::MissingLabelChannel)
        ));
    }
}
