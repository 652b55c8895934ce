//! Ring index recovery for scans that lack per-point laser metadata.
//!
//! Rotating sensors store points laser by laser, each laser sweeping its
//! azimuth monotonically upward across one revolution. A new ring therefore
//! starts wherever the azimuth either drops or jumps by more than a small
//! threshold. Validation checks the recovered assignment against the sensor's
//! published limits (ring count, points per revolution).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cloud::{computed_azimuths, PointCloud};

/// Default azimuth continuity threshold in degrees.
///
/// A 64×2048 sensor steps ~0.176° between samples; 1° tolerates jitter and
/// short gaps while still rejecting the ≥358° wrap between rings. Exposed as
/// a CLI flag for other sensors.
pub const DEFAULT_AZIMUTH_THRESHOLD_DEG: f64 = 1.0;

/// Ring-count limit for the 64-laser sensor used by the reference dataset.
pub const KITTI_MAX_RINGS: u16 = 64;

/// Observed per-revolution point cap for the same sensor.
pub const KITTI_MAX_POINTS_PER_RING: u32 = 2180;

#[derive(Debug, Clone, PartialEq)]
pub enum RingIndexError {
    EmptyCloud,
    /// `threshold_t` must be a positive, finite number of degrees.
    InvalidThreshold(f64),
    /// More rings than fit in the index type.
    RingOverflow,
    /// `max_rings` must be at least one.
    InvalidMaxRings,
    /// Overflow rings are not confined to the tail of the sequence, so the
    /// trailing-noise repair does not apply.
    Unrepairable { first_overflow_index: usize },
}

impl fmt::Display for RingIndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingIndexError::EmptyCloud => write!(f, "cannot assign rings to an empty cloud"),
            RingIndexError::InvalidThreshold(t) => {
                write!(f, "azimuth threshold must be positive and finite, got {t}")
            }
            RingIndexError::RingOverflow => write!(f, "ring index exceeds u16 range"),
            RingIndexError::InvalidMaxRings => write!(f, "max_rings must be at least 1"),
            RingIndexError::Unrepairable { first_overflow_index } => write!(
                f,
                "overflow rings are not a contiguous tail (first overflow at point {first_overflow_index})"
            ),
        }
    }
}

/// Per-point ring indices plus summary counts.
#[derive(Debug, Clone, PartialEq)]
pub struct RingAssignment {
    rings: Vec<u16>,
    num_rings: u16,
    points_per_ring: Vec<u32>,
}

impl RingAssignment {
    /// Wrap an existing per-point ring array (e.g. a sensor-native field or
    /// a sidecar file) and compute the summary counts.
    pub fn from_rings(rings: Vec<u16>) -> Self {
        let num_rings = rings.iter().copied().max().map_or(0, |m| m + 1);
        let mut points_per_ring = vec![0u32; num_rings as usize];
        for &r in &rings {
            points_per_ring[r as usize] += 1;
        }
        RingAssignment { rings, num_rings, points_per_ring }
    }

    #[inline]
    pub fn rings(&self) -> &[u16] {
        &self.rings
    }

    /// `max(rings) + 1`, i.e. the image height a scan-unfolding projection
    /// needs at minimum.
    #[inline]
    pub fn num_rings(&self) -> u16 {
        self.num_rings
    }

    #[inline]
    pub fn points_per_ring(&self) -> &[u32] {
        &self.points_per_ring
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rings.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }
}

/// Which validation rule a [`RingViolation`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingRule {
    MaxRings,
    MaxPointsPerRing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingViolation {
    pub rule: RingRule,
    pub ring: u16,
    pub count: u32,
}

/// Outcome of [`validate_ring_indices`]; never an error, only findings.
#[derive(Debug, Clone, PartialEq)]
pub struct RingValidationReport {
    pub max_ring_ok: bool,
    pub max_per_line_ok: bool,
    pub violations: Vec<RingViolation>,
}

impl RingValidationReport {
    #[inline]
    pub fn is_ok(&self) -> bool {
        self.max_ring_ok && self.max_per_line_ok
    }
}

/// Assign a ring index to every point of `cloud` in storage order.
///
/// The fold starts at ring 0 and increments whenever the azimuth decreases
/// or jumps by more than `threshold_deg`; both conditions are evaluated on
/// angles shifted into `[0°, 360°)`. The assignment depends on storage order
/// by design — callers must not reorder points first.
pub fn generate_ring_indices(
    cloud: &PointCloud,
    threshold_deg: f64,
) -> Result<RingAssignment, RingIndexError> {
    if cloud.is_empty() {
        return Err(RingIndexError::EmptyCloud);
    }
    if !(threshold_deg > 0.0) || !threshold_deg.is_finite() {
        return Err(RingIndexError::InvalidThreshold(threshold_deg));
    }
    let azimuths = computed_azimuths(cloud.positions());
    let mut rings = Vec::with_capacity(azimuths.len());
    let mut current: u16 = 0;
    rings.push(0u16);
    for i in 1..azimuths.len() {
        let theta = azimuths[i];
        let prev = azimuths[i - 1];
        let same_ring = theta >= prev && (theta - prev).abs() <= threshold_deg;
        if !same_ring {
            current = current.checked_add(1).ok_or(RingIndexError::RingOverflow)?;
        }
        rings.push(current);
    }
    Ok(RingAssignment::from_rings(rings))
}

/// Check an assignment against the two sensor rules: at most `max_rings`
/// rings, at most `max_per_ring` points in any one ring. All violations are
/// reported; validation itself never fails.
pub fn validate_ring_indices(
    assignment: &RingAssignment,
    max_rings: u16,
    max_per_ring: u32,
) -> RingValidationReport {
    let mut violations = Vec::new();
    for (ring, &count) in assignment.points_per_ring.iter().enumerate() {
        let ring = ring as u16;
        if ring >= max_rings && count > 0 {
            violations.push(RingViolation { rule: RingRule::MaxRings, ring, count });
        }
        if count > max_per_ring {
            violations.push(RingViolation { rule: RingRule::MaxPointsPerRing, ring, count });
        }
    }
    RingValidationReport {
        max_ring_ok: !violations.iter().any(|v| v.rule == RingRule::MaxRings),
        max_per_line_ok: !violations.iter().any(|v| v.rule == RingRule::MaxPointsPerRing),
        violations,
    }
}

/// Clamp trailing overflow rings to `max_rings − 1`.
///
/// Sensors occasionally emit a stray final point whose azimuth restarts the
/// ring counter past the laser count; such points are noise and belong to
/// the last real ring. The repair only applies when every overflow point
/// sits at the tail of the sequence — overflow in the middle means the
/// assignment is wrong for a different reason and is refused.
pub fn repair_trailing_noise(
    assignment: &RingAssignment,
    max_rings: u16,
) -> Result<RingAssignment, RingIndexError> {
    if max_rings == 0 {
        return Err(RingIndexError::InvalidMaxRings);
    }
    let first_overflow = match assignment.rings.iter().position(|&r| r >= max_rings) {
        None => return Ok(assignment.clone()),
        Some(i) => i,
    };
    if assignment.rings[first_overflow..].iter().any(|&r| r < max_rings) {
        return Err(RingIndexError::Unrepairable { first_overflow_index: first_overflow });
    }
    let mut rings = assignment.rings.clone();
    for r in rings[first_overflow..].iter_mut() {
        *r = max_rings - 1;
    }
    Ok(RingAssignment::from_rings(rings))
}
