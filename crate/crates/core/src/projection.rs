//! Range-image construction.
//!
//! Two projections are provided: scan unfolding (each laser ring gets its own
//! image row, columns from azimuth) and the classic spherical projection
//! (rows from elevation). Both resolve pixel collisions by keeping the
//! nearest point and record every input point's pixel in a look-up table so
//! labels can be carried back to the full cloud, occluded points included.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cloud::{effective_azimuths, PointCloud};
use crate::math;
use crate::ring_index::RingAssignment;

/// Vertical field of view defaults for 64-laser sensors, degrees.
pub const DEFAULT_FOV_UP_DEG: f64 = 3.0;
pub const DEFAULT_FOV_DOWN_DEG: f64 = -25.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionError {
    /// Height and width must both be at least one.
    InvalidDimensions { height: usize, width: usize },
    /// The ring assignment covers a different number of points than the cloud.
    RingsLengthMismatch { expected: usize, got: usize },
    /// More rings than image rows.
    RingCountExceedsHeight { num_rings: u16, height: usize },
    /// `fov_up` must be strictly greater than `fov_down`.
    InvalidFov { fov_up_deg: f64, fov_down_deg: f64 },
    /// Scan unfolding was requested without any ring source.
    MissingRings,
    /// The image has no label channel to read.
    MissingLabelChannel,
    /// A look-up table entry points outside the image or duplicates a point.
    CorruptedLut { entry: usize },
}

impl fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionError::InvalidDimensions { height, width } => {
                write!(f, "invalid image dimensions {height}x{width}")
            }
            ProjectionError::RingsLengthMismatch { expected, got } => {
                write!(f, "ring assignment covers {got} points, cloud has {expected}")
            }
            ProjectionError::RingCountExceedsHeight { num_rings, height } => {
                write!(f, "{num_rings} rings do not fit an image of height {height}")
            }
            ProjectionError::InvalidFov { fov_up_deg, fov_down_deg } => {
                write!(f, "fov_up ({fov_up_deg}) must exceed fov_down ({fov_down_deg})")
            }
            ProjectionError::MissingRings => {
                write!(f, "scan unfolding requires ring indices (sidecar, generated, or native)")
            }
            ProjectionError::MissingLabelChannel => write!(f, "image has no label channel"),
            ProjectionError::CorruptedLut { entry } => {
                write!(f, "corrupted look-up table at entry {entry}")
            }
        }
    }
}

/// Multi-channel H×W grid. `mask` decides pixel validity; every value
/// channel of an invalid pixel is zero. `filled` marks pixels written by
/// hole filling rather than projection, so metrics can include or exclude
/// them explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImage {
    pub height: usize,
    pub width: usize,
    pub range: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub intensity: Vec<f64>,
    pub mask: Vec<u8>,
    pub label: Option<Vec<u32>>,
    pub filled: Vec<u8>,
}

impl RangeImage {
    pub fn empty(height: usize, width: usize, with_labels: bool) -> Self {
        let n = height * width;
        RangeImage {
            height,
            width,
            range: vec![0.0; n],
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
            intensity: vec![0.0; n],
            mask: vec![0; n],
            label: if with_labels { Some(vec![0; n]) } else { None },
            filled: vec![0; n],
        }
    }

    #[inline]
    pub fn idx(&self, v: usize, u: usize) -> usize {
        v * self.width + u
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    /// Number of valid (mask = 1) pixels.
    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m == 1).count()
    }

    /// Check the structural invariants: channel lengths, valid pixels with
    /// positive self-consistent ranges, invalid pixels all zero.
    pub fn validate(&self) -> Result<(), &'static str> {
        let n = self.pixel_count();
        if self.range.len() != n
            || self.x.len() != n
            || self.y.len() != n
            || self.z.len() != n
            || self.intensity.len() != n
            || self.mask.len() != n
            || self.filled.len() != n
            || self.label.as_ref().is_some_and(|l| l.len() != n)
        {
            return Err("channel length mismatch");
        }
        for i in 0..n {
            if self.mask[i] == 1 {
                if !(self.range[i] > 0.0) {
                    return Err("valid pixel with non-positive range");
                }
                let r2 = self.x[i] * self.x[i] + self.y[i] * self.y[i] + self.z[i] * self.z[i];
                let want = self.range[i] * self.range[i];
                if (r2 - want).abs() > 1e-6 * want {
                    return Err("valid pixel range inconsistent with coordinates");
                }
            } else if self.range[i] != 0.0
                || self.x[i] != 0.0
                || self.y[i] != 0.0
                || self.z[i] != 0.0
                || self.intensity[i] != 0.0
            {
                return Err("invalid pixel with non-zero value channel");
            }
        }
        Ok(())
    }
}

/// Per-point pixel coordinates, one entry per input point regardless of
/// occlusion. Three parallel arrays: point index, image row, image column.
#[derive(Debug, Clone, PartialEq)]
pub struct LookUpTable {
    pub point_index: Vec<u32>,
    pub v: Vec<u32>,
    pub u: Vec<u32>,
}

impl LookUpTable {
    pub fn with_capacity(n: usize) -> Self {
        LookUpTable {
            point_index: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.point_index.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.point_index.is_empty()
    }

    #[inline]
    fn push(&mut self, point: usize, v: usize, u: usize) {
        self.point_index.push(point as u32);
        self.v.push(v as u32);
        self.u.push(u as u32);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub image: RangeImage,
    pub lut: LookUpTable,
    /// Number of points that survived collision resolution (valid pixels).
    pub kept_count: usize,
}

/// Which projection to run, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectorConfig {
    /// Rows are laser rings; `height` may force a taller image than
    /// `num_rings` (e.g. a fixed 64 for sparser scans).
    ScanUnfolding { width: usize, height: Option<usize> },
    Spherical { height: usize, width: usize, fov_up_deg: f64, fov_down_deg: f64 },
}

/// Dispatch on [`ProjectorConfig`]. Scan unfolding takes its rings from the
/// explicit argument first, then from the cloud's native ring attribute.
pub fn project(
    cloud: &PointCloud,
    config: &ProjectorConfig,
    rings: Option<&RingAssignment>,
) -> Result<ProjectionResult, ProjectionError> {
    match *config {
        ProjectorConfig::ScanUnfolding { width, height } => match rings {
            Some(r) => project_scan_unfolding(cloud, r, width, height),
            None => {
                let native = cloud.rings().ok_or(ProjectionError::MissingRings)?;
                let assignment = RingAssignment::from_rings(native.to_vec());
                project_scan_unfolding(cloud, &assignment, width, height)
            }
        },
        ProjectorConfig::Spherical { height, width, fov_up_deg, fov_down_deg } => {
            project_spherical(cloud, height, width, fov_up_deg, fov_down_deg)
        }
    }
}

/// Column for an azimuth in `[0°, 360°)`: `u = ⌊θ/360·W⌋`, with the 360°
/// seam wrapping to column 0 and a final clamp against rounding overshoot.
#[inline]
fn column_of(theta_deg: f64, width: usize) -> usize {
    let mut u = math::floor(theta_deg / 360.0 * width as f64) as i64;
    if u >= width as i64 {
        u -= width as i64;
    }
    u.clamp(0, width as i64 - 1) as usize
}

struct Collector {
    /// Winning point per pixel, or `u32::MAX` when empty.
    winner: Vec<u32>,
    best_range: Vec<f64>,
}

impl Collector {
    fn new(pixels: usize) -> Self {
        Collector { winner: vec![u32::MAX; pixels], best_range: vec![f64::INFINITY; pixels] }
    }

    /// Keep the smaller range; ties keep the earlier point index. Scanning
    /// points in index order makes the outcome independent of any other
    /// ordering.
    #[inline]
    fn offer(&mut self, pixel: usize, point: usize, range: f64) {
        if range < self.best_range[pixel] {
            self.best_range[pixel] = range;
            self.winner[pixel] = point as u32;
        }
    }

    fn finish(self, cloud: &PointCloud, mut image: RangeImage) -> (RangeImage, usize) {
        let mut kept = 0;
        for (pixel, &winner) in self.winner.iter().enumerate() {
            if winner == u32::MAX {
                continue;
            }
            let p = cloud.positions()[winner as usize];
            image.range[pixel] = self.best_range[pixel];
            image.x[pixel] = p.x;
            image.y[pixel] = p.y;
            image.z[pixel] = p.z;
            image.intensity[pixel] = cloud.intensities()[winner as usize];
            image.mask[pixel] = 1;
            if let (Some(out), Some(src)) = (image.label.as_mut(), cloud.labels()) {
                out[pixel] = src[winner as usize];
            }
            kept += 1;
        }
        (image, kept)
    }
}

/// Scan unfolding: `v` is the point's ring, `u` comes from its azimuth.
///
/// `height` defaults to the ring count. Every point lands in the look-up
/// table; only valid returns (non-zero coordinates) compete for pixels.
pub fn project_scan_unfolding(
    cloud: &PointCloud,
    rings: &RingAssignment,
    width: usize,
    height: Option<usize>,
) -> Result<ProjectionResult, ProjectionError> {
    let height = height.unwrap_or(rings.num_rings() as usize);
    if width < 1 || height < 1 {
        return Err(ProjectionError::InvalidDimensions { height, width });
    }
    if rings.len() != cloud.len() {
        return Err(ProjectionError::RingsLengthMismatch {
            expected: cloud.len(),
            got: rings.len(),
        });
    }
    if rings.num_rings() as usize > height {
        return Err(ProjectionError::RingCountExceedsHeight {
            num_rings: rings.num_rings(),
            height,
        });
    }

    let azimuths = effective_azimuths(cloud);
    let image = RangeImage::empty(height, width, cloud.labels().is_some());
    let mut lut = LookUpTable::with_capacity(cloud.len());
    let mut collector = Collector::new(height * width);

    for (i, &p) in cloud.positions().iter().enumerate() {
        let v = rings.rings()[i] as usize;
        let u = column_of(azimuths[i], width);
        lut.push(i, v, u);
        if p.is_valid_return() {
            collector.offer(v * width + u, i, p.norm());
        }
    }
    let (image, kept_count) = collector.finish(cloud, image);
    Ok(ProjectionResult { image, lut, kept_count })
}

/// Spherical projection: `v` from elevation within `[fov_down, fov_up]`,
/// `u` from azimuth.
///
/// Zero-range points have no elevation; they are skipped (their look-up
/// entry repeats the previous point's pixel so the table still covers every
/// point).
pub fn project_spherical(
    cloud: &PointCloud,
    height: usize,
    width: usize,
    fov_up_deg: f64,
    fov_down_deg: f64,
) -> Result<ProjectionResult, ProjectionError> {
    if width < 1 || height < 1 {
        return Err(ProjectionError::InvalidDimensions { height, width });
    }
    if !(fov_up_deg > fov_down_deg) {
        return Err(ProjectionError::InvalidFov { fov_up_deg, fov_down_deg });
    }

    let azimuths = effective_azimuths(cloud);
    let fov_span = fov_up_deg - fov_down_deg;
    let image = RangeImage::empty(height, width, cloud.labels().is_some());
    let mut lut = LookUpTable::with_capacity(cloud.len());
    let mut collector = Collector::new(height * width);
    let mut last_pixel = (0usize, 0usize);

    for (i, &p) in cloud.positions().iter().enumerate() {
        let range = p.norm();
        if !p.is_valid_return() || range == 0.0 {
            lut.push(i, last_pixel.0, last_pixel.1);
            continue;
        }
        let elevation_deg = math::asin((p.z / range).clamp(-1.0, 1.0)).to_degrees();
        let v_raw = math::floor((1.0 - (elevation_deg - fov_down_deg) / fov_span) * height as f64)
            as i64;
        let v = v_raw.clamp(0, height as i64 - 1) as usize;
        let u = column_of(azimuths[i], width);
        lut.push(i, v, u);
        last_pixel = (v, u);
        collector.offer(v * width + u, i, range);
    }
    let (image, kept_count) = collector.finish(cloud, image);
    Ok(ProjectionResult { image, lut, kept_count })
}

/// Read a label for every point back off the image through the look-up
/// table. Points occluded at projection time receive the label of whichever
/// point won their pixel — exactly the information loss the upper-bound
/// metric measures.
pub fn unproject_labels(
    image: &RangeImage,
    lut: &LookUpTable,
) -> Result<Vec<u32>, ProjectionError> {
    let labels = image.label.as_ref().ok_or(ProjectionError::MissingLabelChannel)?;
    let mut out = vec![0u32; lut.len()];
    let mut seen = vec![false; lut.len()];
    for entry in 0..lut.len() {
        let point = lut.point_index[entry] as usize;
        let (v, u) = (lut.v[entry] as usize, lut.u[entry] as usize);
        if point >= out.len() || seen[point] || v >= image.height || u >= image.width {
            return Err(ProjectionError::CorruptedLut { entry });
        }
        seen[point] = true;
        out[point] = labels[v * image.width + u];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn point_at(azimuth_deg: f64, range: f64, z: f64) -> Vec3 {
        let rad = azimuth_deg.to_radians();
        let horizontal = (range * range - z * z).sqrt();
        Vec3::new(horizontal * rad.cos(), horizontal * rad.sin(), z)
    }

    #[test]
    fn collision_free_quadrants() {
        let positions = vec![
            point_at(0.0, 5.0, 0.0),
            point_at(90.0, 5.0, 0.0),
            point_at(180.0, 5.0, 0.0),
            point_at(270.0, 5.0, 0.0),
        ];
        let cloud = PointCloud::from_positions(positions);
        let rings = RingAssignment::from_rings(vec![0, 0, 1, 1]);
        let r = project_scan_unfolding(&cloud, &rings, 4, None).unwrap();
        assert_eq!(r.kept_count, 4);
        assert_eq!(r.image.height, 2);
        assert_eq!(r.image.width, 4);
        assert_eq!(r.lut.v, vec![0, 0, 1, 1]);
        assert_eq!(r.lut.u, vec![0, 1, 2, 3]);
        for (v, u) in [(0, 0), (0, 1), (1, 2), (1, 3)] {
            assert_eq!(r.image.mask[r.image.idx(v, u)], 1);
        }
        r.image.validate().unwrap();
    }

    #[test]
    fn same_pixel_keeps_the_nearer_point() {
        // Azimuths 0.0° and 0.1° share column 0 of a 360-wide image.
        let cloud = PointCloud::from_positions(vec![
            point_at(0.0, 7.0, 0.0),
            point_at(0.1, 3.0, 0.0),
        ]);
        let rings = RingAssignment::from_rings(vec![0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 360, None).unwrap();
        assert_eq!(r.kept_count, 1);
        assert_eq!(r.lut.u, vec![0, 0]);
        assert!((r.image.range[0] - 3.0).abs() < 1e-12);
        // Both points are in the LUT even though one is occluded.
        assert_eq!(r.lut.len(), 2);
    }

    #[test]
    fn equal_ranges_keep_the_lower_point_index() {
        let cloud = PointCloud::from_positions(vec![
            point_at(0.0, 5.0, 0.0),
            point_at(0.1, 5.0, 0.0),
        ]);
        let rings = RingAssignment::from_rings(vec![0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 360, None).unwrap();
        let p = cloud.positions()[0];
        assert_eq!(r.image.x[0], p.x);
        assert_eq!(r.image.y[0], p.y);
    }

    #[test]
    fn image_is_order_independent_for_distinct_ranges() {
        let mut positions = Vec::new();
        for i in 0..200 {
            positions.push(point_at((i as f64 * 7.7) % 360.0, 2.0 + i as f64 * 0.03, 0.0));
        }
        let forward = PointCloud::from_positions(positions.clone());
        positions.reverse();
        let backward = PointCloud::from_positions(positions);
        let rings = RingAssignment::from_rings(vec![0; 200]);
        let a = project_scan_unfolding(&forward, &rings, 64, None).unwrap();
        let b = project_scan_unfolding(&backward, &rings, 64, None).unwrap();
        assert_eq!(a.image.range, b.image.range);
        assert_eq!(a.image.mask, b.image.mask);
        assert_eq!(a.kept_count, b.kept_count);
    }

    #[test]
    fn ring_count_must_fit_height() {
        let cloud = PointCloud::from_positions(vec![point_at(10.0, 5.0, 0.0); 3]);
        let rings = RingAssignment::from_rings(vec![0, 1, 2]);
        assert!(matches!(
            project_scan_unfolding(&cloud, &rings, 16, Some(2)),
            Err(ProjectionError::RingCountExceedsHeight { num_rings: 3, height: 2 })
        ));
        // A forced taller image is fine.
        let r = project_scan_unfolding(&cloud, &rings, 16, Some(64)).unwrap();
        assert_eq!(r.image.height, 64);
    }

    #[test]
    fn zero_range_points_stay_out_of_the_image_but_in_the_lut() {
        let cloud = PointCloud::from_positions(vec![
            point_at(0.0, 5.0, 0.0),
            Vec3::ZERO,
            point_at(90.0, 5.0, 0.0),
        ]);
        let rings = RingAssignment::from_rings(vec![0, 0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 4, None).unwrap();
        assert_eq!(r.kept_count, 2);
        assert_eq!(r.lut.len(), 3);
        r.image.validate().unwrap();
    }

    #[test]
    fn spherical_boundary_rows() {
        let (fov_up, fov_down) = (3.0, -25.0);
        let h = 64;
        // Elevation exercises only v; give the two points distinct azimuths.
        let top = point_at(0.0, 10.0, 10.0 * (3.0f64).to_radians().sin());
        let bottom = point_at(90.0, 10.0, 10.0 * (-25.0f64).to_radians().sin());
        let cloud = PointCloud::from_positions(vec![top, bottom]);
        let r = project_spherical(&cloud, h, 16, fov_up, fov_down).unwrap();
        assert_eq!(r.lut.v[0], 0);
        assert_eq!(r.lut.v[1], h as u32 - 1);
    }

    #[test]
    fn spherical_rejects_bad_fov() {
        let cloud = PointCloud::from_positions(vec![point_at(0.0, 5.0, 0.0)]);
        assert!(matches!(
            project_spherical(&cloud, 4, 4, -25.0, 3.0),
            Err(ProjectionError::InvalidFov { .. })
        ));
    }

    #[test]
    fn unproject_round_trips_labels_when_collision_free() {
        let positions = vec![
            point_at(0.0, 5.0, 0.0),
            point_at(90.0, 6.0, 0.0),
            point_at(180.0, 7.0, 0.0),
        ];
        let cloud = PointCloud::from_positions(positions)
            .with_labels(vec![3, 1, 9])
            .unwrap();
        let rings = RingAssignment::from_rings(vec![0, 0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 4, None).unwrap();
        let back = unproject_labels(&r.image, &r.lut).unwrap();
        assert_eq!(back, vec![3, 1, 9]);
    }

    #[test]
    fn occluded_points_inherit_the_kept_label() {
        let cloud = PointCloud::from_positions(vec![
            point_at(0.0, 7.0, 0.0),
            point_at(0.1, 3.0, 0.0),
        ])
        .with_labels(vec![5, 8])
        .unwrap();
        let rings = RingAssignment::from_rings(vec![0, 0]);
        let r = project_scan_unfolding(&cloud, &rings, 360, None).unwrap();
        let back = unproject_labels(&r.image, &r.lut).unwrap();
        // The nearer point (index 1, label 8) wins the pixel; both points
        // read that label back.
        assert_eq!(back, vec![8, 8]);
    }

    #[test]
    fn all_ignored_label_image_unprojects_to_ignored() {
        let cloud = PointCloud::from_positions(vec![point_at(0.0, 5.0, 0.0); 4])
            .with_labels(vec![0; 4])
            .unwrap();
        let rings = RingAssignment::from_rings(vec![0; 4]);
        let r = project_scan_unfolding(&cloud, &rings, 8, None).unwrap();
        assert_eq!(unproject_labels(&r.image, &r.lut).unwrap(), vec![0; 4]);
    }

    #[test]
    fn unproject_rejects_out_of_bounds_lut() {
        let cloud = PointCloud::from_positions(vec![point_at(0.0, 5.0, 0.0)])
            .with_labels(vec![1])
            .unwrap();
        let rings = RingAssignment::from_rings(vec![0]);
        let r = project_scan_unfolding(&cloud, &rings, 4, None).unwrap();
        let mut lut = r.lut.clone();
        lut.u[0] = 99;
        assert!(matches!(
            unproject_labels(&r.image, &lut),
            Err(ProjectionError::CorruptedLut { entry: 0 })
        ));
        let no_labels = RangeImage::empty(1, 4, false);
        assert!(matches!(
            unproject_labels(&no_labels, &r.lut),
            Err(ProjectionError::MissingLabelChannel)
        ));
    }

    #[test]
    fn kept_pixels_hold_the_minimum_range() {
        let mut positions = Vec::new();
        for i in 0..500 {
            positions.push(point_at(
                (i as f64 * 3.17) % 360.0,
                1.0 + ((i * 37) % 97) as f64 * 0.1,
                0.0,
            ));
        }
        let cloud = PointCloud::from_positions(positions);
        let rings = RingAssignment::from_rings(vec![0; 500]);
        let r = project_scan_unfolding(&cloud, &rings, 32, None).unwrap();
        for (i, &p) in cloud.positions().iter().enumerate() {
            let (v, u) = (r.lut.v[i] as usize, r.lut.u[i] as usize);
            let pixel = r.image.idx(v, u);
            assert_eq!(r.image.mask[pixel], 1);
            assert!(r.image.range[pixel] <= p.norm() + 1e-12);
        }
    }

    #[test]
    fn stored_azimuths_override_coordinates() {
        // Coordinates say 0°, the attribute says 180°; the attribute wins.
        let cloud = PointCloud::from_positions(vec![point_at(0.0, 5.0, 0.0)])
            .with_azimuths_deg(vec![180.0])
            .unwrap();
        let rings = RingAssignment::from_rings(vec![0]);
        let r = project_scan_unfolding(&cloud, &rings, 4, None).unwrap();
        assert_eq!(r.lut.u, vec![2]);
    }

    #[test]
    fn column_wraps_at_the_seam() {
        assert_eq!(column_of(360.0, 2048), 0);
        assert_eq!(column_of(0.0, 2048), 0);
        assert_eq!(column_of(359.9999999, 2048), 2047);
    }
}
