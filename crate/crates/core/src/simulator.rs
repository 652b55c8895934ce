//! Synthetic rotating-LiDAR oracle.
//!
//! A sensor with configurable lasers sweeps one revolution over a scene of
//! labeled primitives while moving under a constant velocity, emitting both
//! the raw (firing-time) and analytically deskewed coordinates of every
//! return together with ground-truth ring indices, azimuths, timestamps, and
//! labels. Randomness is counter-based on `(seed, ring, sample)`, so scans
//! are bit-identical across platforms and traversal orders.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cloud::PointCloud;
use crate::geometry::{self, Vec3};
use crate::math;
use crate::motion::VelocityEstimate;
use crate::rng;

const RAY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SimulatorError {
    InvalidSensor(&'static str),
    InvalidScene(&'static str),
}

impl fmt::Display for SimulatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulatorError::InvalidSensor(why) => write!(f, "invalid sensor: {why}"),
            SimulatorError::InvalidScene(why) => write!(f, "invalid scene: {why}"),
        }
    }
}

/// Order in which samples are serialized into the output arrays.
///
/// Ring-major matches how rotating sensors store data (all of ring 0, then
/// ring 1, …) and is what ring-index generation assumes; column-major is an
/// adversarial mode for exercising the validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiringOrder {
    #[default]
    RingMajor,
    ColumnMajor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    pub num_lasers: usize,
    /// Per-laser elevation, degrees, strictly decreasing from the top laser.
    /// Uneven spacing is allowed (and is exactly what makes spherical
    /// projection collide).
    pub vertical_angles_deg: Vec<f64>,
    pub samples_per_rev: usize,
    pub max_range: f64,
    /// Per-sample probability of losing a return. Drops are thinned so two
    /// consecutive samples of one ring never both drop, which keeps azimuth
    /// gaps below twice the sample step.
    pub dropout_prob: f64,
    pub firing_order: FiringOrder,
}

impl SensorModel {
    fn validate(&self) -> Result<(), SimulatorError> {
        if self.num_lasers == 0 || self.num_lasers != self.vertical_angles_deg.len() {
            return Err(SimulatorError::InvalidSensor(
                "num_lasers must match the vertical angle count and be positive",
            ));
        }
        if self.num_lasers > u16::MAX as usize {
            return Err(SimulatorError::InvalidSensor("too many lasers for a u16 ring index"));
        }
        if !self
            .vertical_angles_deg
            .windows(2)
            .all(|w| w[0] > w[1] && w[0].is_finite() && w[1].is_finite())
        {
            return Err(SimulatorError::InvalidSensor(
                "vertical angles must be finite and strictly decreasing",
            ));
        }
        if self.samples_per_rev < 1 {
            return Err(SimulatorError::InvalidSensor("samples_per_rev must be at least 1"));
        }
        if !(self.max_range > 0.0) {
            return Err(SimulatorError::InvalidSensor("max_range must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(SimulatorError::InvalidSensor("dropout_prob must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// A 64-laser sensor with two banks of unequal vertical spacing (top bank
/// 1/3° apart, bottom bank 1/2° apart, ≈ +2° to −24.8°), 2048 samples per
/// revolution. The uneven spacing reproduces the row-overlap pathology of
/// spherical projection while scan unfolding stays collision-free.
pub fn make_kitti_like_sensor() -> SensorModel {
    let mut vertical_angles_deg = Vec::with_capacity(64);
    for i in 0..32 {
        vertical_angles_deg.push(2.0 - i as f64 / 3.0);
    }
    for j in 0..32 {
        vertical_angles_deg.push(-28.0 / 3.0 - j as f64 / 2.0);
    }
    SensorModel {
        num_lasers: 64,
        vertical_angles_deg,
        samples_per_rev: 2048,
        max_range: 120.0,
        dropout_prob: 0.0,
        firing_order: FiringOrder::RingMajor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPlane {
    pub z: f64,
    pub label: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub label: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
    pub label: u32,
}

/// Static scene in the scan-start frame. A box containing the sensor acts
/// as a room whose walls return every ray.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    pub ground: Option<GroundPlane>,
    pub spheres: Vec<Sphere>,
    pub boxes: Vec<Aabb>,
}

impl Scene {
    fn validate(&self) -> Result<(), SimulatorError> {
        if self.spheres.iter().any(|s| !(s.radius >= 0.0) || !s.center.is_finite()) {
            return Err(SimulatorError::InvalidScene("sphere radii must be non-negative"));
        }
        if self
            .boxes
            .iter()
            .any(|b| b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z)
        {
            return Err(SimulatorError::InvalidScene("box bounds must be ordered min <= max"));
        }
        Ok(())
    }

    /// Nearest hit of the ray `origin + t·dir` (unit `dir`) within
    /// `max_range`, as `(t, label)`.
    fn cast(&self, origin: Vec3, dir: Vec3, max_range: f64) -> Option<(f64, u32)> {
        let mut best: Option<(f64, u32)> = None;
        let mut offer = |t: Option<f64>, label: u32| {
            if let Some(t) = t {
                if t > RAY_EPS && t <= max_range && best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, label));
                }
            }
        };
        if let Some(ground) = &self.ground {
            offer(ray_plane_z(origin, dir, ground.z), ground.label);
        }
        for sphere in &self.spheres {
            offer(ray_sphere(origin, dir, sphere.center, sphere.radius), sphere.label);
        }
        for b in &self.boxes {
            offer(ray_aabb(origin, dir, b.min, b.max), b.label);
        }
        best
    }
}

fn ray_plane_z(origin: Vec3, dir: Vec3, z: f64) -> Option<f64> {
    if dir.z.abs() < 1e-15 {
        return None;
    }
    let t = (z - origin.z) / dir.z;
    (t > RAY_EPS).then_some(t)
}

fn ray_sphere(origin: Vec3, dir: Vec3, center: Vec3, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = math::sqrt(disc);
    let t_near = -b - sq;
    if t_near > RAY_EPS {
        return Some(t_near);
    }
    let t_far = -b + sq;
    (t_far > RAY_EPS).then_some(t_far)
}

/// Slab test; returns the entry distance from outside or the exit distance
/// from inside (room walls).
fn ray_aabb(origin: Vec3, dir: Vec3, min: Vec3, max: Vec3) -> Option<f64> {
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for ((o, d), (lo, hi)) in [
        ((origin.x, dir.x), (min.x, max.x)),
        ((origin.y, dir.y), (min.y, max.y)),
        ((origin.z, dir.z), (min.z, max.z)),
    ] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
            continue;
        }
        let (mut t1, mut t2) = ((lo - o) / d, (hi - o) / d);
        if t1 > t2 {
            core::mem::swap(&mut t1, &mut t2);
        }
        t_min = t_min.max(t1);
        t_max = t_max.min(t2);
        if t_min > t_max {
            return None;
        }
    }
    if t_max < RAY_EPS {
        return None;
    }
    if t_min > RAY_EPS {
        Some(t_min)
    } else {
        Some(t_max)
    }
}

/// Everything a simulated revolution knows about itself.
///
/// All arrays are index-aligned and in firing order. Per point,
/// `deskewed = Exp(α·φ)·raw + α·v` holds exactly (the simulator applies the
/// same composition the motion module inverts).
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthScan {
    /// Sensor-frame coordinates at firing time.
    pub raw_points: Vec<Vec3>,
    /// Coordinates in the scan-start frame.
    pub deskewed_points: Vec<Vec3>,
    pub rings: Vec<u16>,
    /// Firing azimuths in `[0°, 360°)`, exact by construction.
    pub azimuths_deg: Vec<f64>,
    /// Firing times as revolution fractions in `[0, 1)`.
    pub alphas: Vec<f64>,
    pub labels: Vec<u32>,
    pub velocity: VelocityEstimate,
}

impl GroundTruthScan {
    pub fn len(&self) -> usize {
        self.raw_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_points.is_empty()
    }

    /// Raw scan as a cloud, with rings, labels, and the exact firing
    /// azimuths attached.
    pub fn raw_cloud(&self) -> PointCloud {
        PointCloud::from_positions(self.raw_points.clone())
            .with_rings(self.rings.clone())
            .expect("aligned by construction")
            .with_labels(self.labels.clone())
            .expect("aligned by construction")
            .with_azimuths_deg(self.azimuths_deg.clone())
            .expect("aligned by construction")
    }

    /// Deskewed scan as a cloud. No azimuth attribute: a motion-compensated
    /// cloud's azimuths are whatever its coordinates say, exactly like the
    /// deskewed scans real datasets ship.
    pub fn deskewed_cloud(&self) -> PointCloud {
        PointCloud::from_positions(self.deskewed_points.clone())
            .with_rings(self.rings.clone())
            .expect("aligned by construction")
            .with_labels(self.labels.clone())
            .expect("aligned by construction")
    }
}

/// Simulate one revolution.
///
/// Lasers fire at azimuth `sample / samples_per_rev · 360°` and time
/// `α = sample / samples_per_rev`; each ray leaves the instantaneous sensor
/// origin `α·v` with the instantaneous orientation `Exp(α·φ)`. The nearest
/// scene hit within `max_range` becomes a return; missed rays and dropped
/// samples emit nothing. An empty scene yields a valid, empty scan.
pub fn simulate_scan(
    sensor: &SensorModel,
    scene: &Scene,
    velocity: &VelocityEstimate,
    seed: u64,
) -> Result<GroundTruthScan, SimulatorError> {
    sensor.validate()?;
    scene.validate()?;

    let samples = sensor.samples_per_rev;
    let dropped = dropout_table(sensor, seed);

    let mut scan = GroundTruthScan {
        raw_points: Vec::new(),
        deskewed_points: Vec::new(),
        rings: Vec::new(),
        azimuths_deg: Vec::new(),
        alphas: Vec::new(),
        labels: Vec::new(),
        velocity: *velocity,
    };

    let mut fire = |ring: usize, sample: usize| {
        if dropped[ring][sample] {
            return;
        }
        let alpha = sample as f64 / samples as f64;
        let azimuth_deg = (sample as f64 * 360.0) / samples as f64;
        let elevation_rad = sensor.vertical_angles_deg[ring].to_radians();
        let azimuth_rad = azimuth_deg.to_radians();
        let (cos_e, sin_e) = (math::cos(elevation_rad), math::sin(elevation_rad));
        let dir_sensor = Vec3::new(
            cos_e * math::cos(azimuth_rad),
            cos_e * math::sin(azimuth_rad),
            sin_e,
        );
        let rotation = geometry::exp_unchecked(velocity.angular().vector() * alpha);
        let origin = velocity.translational() * alpha;
        let dir_world = rotation.apply(dir_sensor);
        let Some((t, label)) = scene.cast(origin, dir_world, sensor.max_range) else {
            return;
        };
        // Raw coordinates are exact: t along the unit sensor-frame
        // direction, with no rotation round trip.
        let raw = dir_sensor * t;
        let deskewed = rotation.apply(raw) + origin;
        scan.raw_points.push(raw);
        scan.deskewed_points.push(deskewed);
        scan.rings.push(ring as u16);
        scan.azimuths_deg.push(azimuth_deg);
        scan.alphas.push(alpha);
        scan.labels.push(label);
    };

    match sensor.firing_order {
        FiringOrder::RingMajor => {
            for ring in 0..sensor.num_lasers {
                for sample in 0..samples {
                    fire(ring, sample);
                }
            }
        }
        FiringOrder::ColumnMajor => {
            for sample in 0..samples {
                for ring in 0..sensor.num_lasers {
                    fire(ring, sample);
                }
            }
        }
    }
    Ok(scan)
}

/// Per-(ring, sample) drop decisions: an i.i.d. Bernoulli draw, thinned so
/// a drop never immediately follows another drop on the same ring.
fn dropout_table(sensor: &SensorModel, seed: u64) -> Vec<Vec<bool>> {
    let mut table = vec![vec![false; sensor.samples_per_rev]; sensor.num_lasers];
    if sensor.dropout_prob <= 0.0 {
        return table;
    }
    for (ring, row) in table.iter_mut().enumerate() {
        let mut prev = false;
        for (sample, slot) in row.iter_mut().enumerate() {
            let bern = rng::uniform(seed, ring as u64, sample as u64) < sensor.dropout_prob;
            *slot = bern && !prev;
            prev = *slot;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RotationVector;
    use crate::motion::{self, TimestampVector};
    use crate::projection::{self, ProjectorConfig};
    use crate::ring_index;

    fn room_scene() -> Scene {
        Scene {
            ground: Some(GroundPlane { z: -1.73, label: 1 }),
            spheres: vec![
                Sphere { center: Vec3::new(12.0, 3.0, 0.5), radius: 2.0, label: 3 },
                Sphere { center: Vec3::new(-8.0, -10.0, 1.0), radius: 3.0, label: 4 },
            ],
            boxes: vec![Aabb {
                min: Vec3::new(-40.0, -40.0, -2.0),
                max: Vec3::new(40.0, 40.0, 8.0),
                label: 2,
            }],
        }
    }

    fn velocity(phi: Vec3, v: Vec3) -> VelocityEstimate {
        VelocityEstimate::new(RotationVector::new(phi).unwrap(), v).unwrap()
    }

    fn small_sensor(elevations: &[f64], samples: usize) -> SensorModel {
        SensorModel {
            num_lasers: elevations.len(),
            vertical_angles_deg: elevations.to_vec(),
            samples_per_rev: samples,
            max_range: 200.0,
            dropout_prob: 0.0,
            firing_order: FiringOrder::RingMajor,
        }
    }

    #[test]
    fn static_sphere_ranges_match_the_quadratic_closed_form() {
        let scene = Scene {
            ground: None,
            spheres: vec![Sphere { center: Vec3::new(10.0, 0.0, 0.0), radius: 4.0, label: 7 }],
            boxes: vec![],
        };
        let sensor = small_sensor(&[0.0], 256);
        let scan = simulate_scan(&sensor, &scene, &VelocityEstimate::ZERO, 0).unwrap();
        assert!(!scan.is_empty());
        for (i, &p) in scan.raw_points.iter().enumerate() {
            // Zero velocity: raw and deskewed agree exactly.
            assert_eq!(p, scan.deskewed_points[i]);
            // Closed form: |t·d − c|² = R² with d unit, c = (10,0,0), solved
            // independently per azimuth.
            let a = scan.azimuths_deg[i].to_radians();
            let d = Vec3::new(a.cos(), a.sin(), 0.0);
            let b = -d.dot(Vec3::new(10.0, 0.0, 0.0));
            let disc = b * b - (100.0 - 16.0);
            assert!(disc >= 0.0, "simulated a ray that should miss");
            let expected = -b - disc.sqrt();
            assert!((p.norm() - expected).abs() < 1e-9);
            assert_eq!(scan.labels[i], 7);
        }
        // The ray straight down the axis sits at exactly 10 − 4.
        assert!((scan.raw_points[0].norm() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn ground_plane_range_matches_trigonometry() {
        let scene = Scene {
            ground: Some(GroundPlane { z: -1.73, label: 1 }),
            spheres: vec![],
            boxes: vec![],
        };
        let sensor = small_sensor(&[-10.0], 16);
        let scan = simulate_scan(&sensor, &scene, &VelocityEstimate::ZERO, 0).unwrap();
        assert_eq!(scan.len(), 16);
        let expected = 1.73 / (10.0f64).to_radians().sin(); // 9.962672935838487
        for &p in &scan.raw_points {
            assert!((p.norm() - expected).abs() < 1e-6);
            assert!((p.z - -1.73).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let sensor = SensorModel { dropout_prob: 0.15, ..make_kitti_like_sensor() };
        let vel = velocity(Vec3::new(0.0, 0.01, 0.08), Vec3::new(1.2, -0.3, 0.0));
        let a = simulate_scan(&sensor, &room_scene(), &vel, 99).unwrap();
        let b = simulate_scan(&sensor, &room_scene(), &vel, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_scan(&sensor, &room_scene(), &vel, 100).unwrap();
        assert_ne!(a.len(), 0);
        assert_ne!(a.raw_points, c.raw_points);
    }

    #[test]
    fn empty_scene_gives_an_empty_scan() {
        let sensor = small_sensor(&[0.0, -1.0], 8);
        let scan = simulate_scan(&sensor, &Scene::default(), &VelocityEstimate::ZERO, 0).unwrap();
        assert!(scan.is_empty());
    }

    #[test]
    fn labels_match_the_surface_the_point_lies_on() {
        let scene = room_scene();
        let vel = velocity(Vec3::new(0.0, 0.0, 0.12), Vec3::new(2.0, 0.5, 0.0));
        let sensor = SensorModel { samples_per_rev: 512, ..make_kitti_like_sensor() };
        let scan = simulate_scan(&sensor, &scene, &vel, 5).unwrap();
        assert!(!scan.is_empty());
        for (i, &p) in scan.deskewed_points.iter().enumerate() {
            // Deskewed coordinates live in the scene's (static) frame.
            let d = match scan.labels[i] {
                1 => (p.z - -1.73).abs(),
                3 => ((p - scene.spheres[0].center).norm() - 2.0).abs(),
                4 => ((p - scene.spheres[1].center).norm() - 3.0).abs(),
                2 => {
                    let b = &scene.boxes[0];
                    [
                        (p.x - b.min.x).abs(),
                        (p.x - b.max.x).abs(),
                        (p.y - b.min.y).abs(),
                        (p.y - b.max.y).abs(),
                        (p.z - b.min.z).abs(),
                        (p.z - b.max.z).abs(),
                    ]
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
                }
                other => panic!("unexpected label {other}"),
            };
            assert!(d < 1e-6, "point {i} is {d} m off its labeled surface");
        }
    }

    #[test]
    fn deskewed_equals_exp_alpha_phi_raw_plus_alpha_v() {
        let vel = velocity(Vec3::new(0.01, -0.02, 0.15), Vec3::new(2.5, 0.8, 0.1));
        let sensor = SensorModel { samples_per_rev: 256, ..make_kitti_like_sensor() };
        let scan = simulate_scan(&sensor, &room_scene(), &vel, 3).unwrap();
        for i in 0..scan.len() {
            let r = geometry::exp_unchecked(vel.angular().vector() * scan.alphas[i]);
            let expect = r.apply(scan.raw_points[i]) + vel.translational() * scan.alphas[i];
            assert!((expect - scan.deskewed_points[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn skewing_the_deskewed_scan_recovers_the_raw_scan() {
        let vel = velocity(Vec3::new(0.0, 0.015, 0.18), Vec3::new(3.0, -0.5, 0.05));
        let sensor = SensorModel { samples_per_rev: 512, ..make_kitti_like_sensor() };
        let scan = simulate_scan(&sensor, &room_scene(), &vel, 8).unwrap();
        let alphas = TimestampVector::new(scan.alphas.clone()).unwrap();
        let skewed = motion::skew_scan(&scan.deskewed_cloud(), &vel, &alphas).unwrap();
        for (got, want) in skewed.positions().iter().zip(&scan.raw_points) {
            assert!((got.x - want.x).abs() < 1e-10);
            assert!((got.y - want.y).abs() < 1e-10);
            assert!((got.z - want.z).abs() < 1e-10);
        }
        let deskewed = motion::deskew_scan(&scan.raw_cloud(), &vel, &alphas).unwrap();
        for (got, want) in deskewed.positions().iter().zip(&scan.deskewed_points) {
            assert!((*got - *want).norm() < 1e-9);
        }
    }

    #[test]
    fn ring_generation_recovers_ground_truth_under_dropout() {
        let sensor = SensorModel {
            samples_per_rev: 512,
            dropout_prob: 0.3,
            ..make_kitti_like_sensor()
        };
        // 512 samples step 0.703°; the thinned dropout keeps gaps ≤ 2 steps.
        // Azimuths reconstructed through atan2 jitter by ~1e-13°, so the
        // threshold needs a hair of margin over the exact 2-step boundary.
        let scan = simulate_scan(&sensor, &room_scene(), &VelocityEstimate::ZERO, 17).unwrap();
        assert!(scan.len() > 20_000);
        let t = 2.01 * 360.0 / 512.0;
        let assignment = ring_index::generate_ring_indices(&scan.raw_cloud(), t).unwrap();
        assert_eq!(assignment.rings(), scan.rings.as_slice());
    }

    #[test]
    fn kitti_like_sensor_shape() {
        let sensor = make_kitti_like_sensor();
        assert_eq!(sensor.num_lasers, 64);
        assert_eq!(sensor.vertical_angles_deg.len(), 64);
        assert!(sensor
            .vertical_angles_deg
            .windows(2)
            .all(|w| w[0] > w[1]));
        assert!((sensor.vertical_angles_deg[0] - 2.0).abs() < 1e-12);
        assert!(sensor.vertical_angles_deg[63] < -24.0);
        assert_eq!(sensor.samples_per_rev, 2048);
        sensor.validate().unwrap();

        // Full revolution in a closed room: every sample returns, so the
        // per-ring histogram is exactly samples_per_rev ≤ 2180.
        let scan = simulate_scan(&sensor, &room_scene(), &VelocityEstimate::ZERO, 1).unwrap();
        assert_eq!(scan.len(), 64 * 2048);
        let assignment = ring_index::generate_ring_indices(&scan.raw_cloud(), 1.0).unwrap();
        let report =
            ring_index::validate_ring_indices(&assignment, 64, ring_index::KITTI_MAX_POINTS_PER_RING);
        assert!(report.is_ok());
        assert!(assignment.points_per_ring().iter().all(|&c| c == 2048));
    }

    #[test]
    fn unfolding_is_collision_free_where_spherical_is_not() {
        let sensor = make_kitti_like_sensor();
        let scan = simulate_scan(&sensor, &room_scene(), &VelocityEstimate::ZERO, 2).unwrap();
        let cloud = scan.raw_cloud();
        let su = projection::project(
            &cloud,
            &ProjectorConfig::ScanUnfolding { width: 2048, height: Some(64) },
            None,
        )
        .unwrap();
        assert_eq!(su.kept_count, cloud.len());
        let sp = projection::project(
            &cloud,
            &ProjectorConfig::Spherical {
                height: 64,
                width: 2048,
                fov_up_deg: projection::DEFAULT_FOV_UP_DEG,
                fov_down_deg: projection::DEFAULT_FOV_DOWN_DEG,
            },
            None,
        )
        .unwrap();
        assert!(sp.kept_count < cloud.len());
    }

    #[test]
    fn column_major_firing_breaks_ring_generation_detectably() {
        let sensor = SensorModel {
            samples_per_rev: 128,
            firing_order: FiringOrder::ColumnMajor,
            ..make_kitti_like_sensor()
        };
        let scan = simulate_scan(&sensor, &room_scene(), &VelocityEstimate::ZERO, 4).unwrap();
        let assignment = ring_index::generate_ring_indices(&scan.raw_cloud(), 1.0).unwrap();
        let report = ring_index::validate_ring_indices(&assignment, 64, 2180);
        assert!(!report.is_ok());
    }

    #[test]
    fn invalid_sensors_and_scenes_are_rejected() {
        let mut sensor = make_kitti_like_sensor();
        sensor.vertical_angles_deg[5] = sensor.vertical_angles_deg[4];
        assert!(matches!(
            simulate_scan(&sensor, &Scene::default(), &VelocityEstimate::ZERO, 0),
            Err(SimulatorError::InvalidSensor(_))
        ));
        let mut sensor = make_kitti_like_sensor();
        sensor.dropout_prob = 1.0;
        assert!(sensor.validate().is_err());

        let scene = Scene {
            ground: None,
            spheres: vec![Sphere { center: Vec3::ZERO, radius: -1.0, label: 0 }],
            boxes: vec![],
        };
        assert!(matches!(
            simulate_scan(&make_kitti_like_sensor(), &scene, &VelocityEstimate::ZERO, 0),
            Err(SimulatorError::InvalidScene(_))
        ));
    }

    #[test]
    fn dropout_never_drops_adjacent_samples() {
        let sensor = SensorModel {
            samples_per_rev: 2048,
            dropout_prob: 0.45,
            ..make_kitti_like_sensor()
        };
        let table = dropout_table(&sensor, 123);
        let mut total = 0usize;
        for row in &table {
            for pair in row.windows(2) {
                assert!(!(pair[0] && pair[1]));
            }
            total += row.iter().filter(|&&d| d).count();
        }
        // Thinned rate for p = 0.45 is p/(1+p) ≈ 0.31.
        let rate = total as f64 / (64.0 * 2048.0);
        assert!(rate > 0.25 && rate < 0.35, "unexpected dropout rate {rate}");
    }
}
