//! Constant-velocity motion model.
//!
//! The sensor's motion over the current scan is assumed equal to its motion
//! between the two previous poses. Velocities carry per-scan units (the scan
//! period is normalized to 1), so per-point timestamps are plain revolution
//! fractions in `[0, 1]` and appear only in `α·φ` / `α·v` products.

use alloc::vec::Vec;
use core::fmt;

use crate::cloud::{effective_azimuths, PointCloud};
use crate::geometry::{self, Pose, RotationVector, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub enum MotionError {
    EmptyCloud,
    /// Timestamp count must equal the point count.
    LengthMismatch { expected: usize, got: usize },
    /// Relative rotation of exactly π has no unique axis, so no velocity
    /// can be predicted from it.
    AmbiguousRotation,
    NonFinite,
    /// A relative timestamp fell outside `[0, 1]`.
    TimestampOutOfRange { index: usize, value: f64 },
}

impl fmt::Display for MotionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotionError::EmptyCloud => write!(f, "empty cloud"),
            MotionError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} timestamps, got {got}")
            }
            MotionError::AmbiguousRotation => {
                write!(f, "relative rotation angle reaches pi; axis is ambiguous")
            }
            MotionError::NonFinite => write!(f, "non-finite velocity"),
            MotionError::TimestampOutOfRange { index, value } => {
                write!(f, "timestamp {value} at index {index} outside [0, 1]")
            }
        }
    }
}

/// Per-scan angular and translational velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEstimate {
    phi: RotationVector,
    v: Vec3,
}

impl VelocityEstimate {
    pub const ZERO: VelocityEstimate = VelocityEstimate {
        phi: RotationVector::ZERO,
        v: Vec3::ZERO,
    };

    /// Angular velocity must stay below a half turn per scan — the model is
    /// meaningless past that — and everything must be finite.
    pub fn new(phi: RotationVector, v: Vec3) -> Result<Self, MotionError> {
        if !v.is_finite() {
            return Err(MotionError::NonFinite);
        }
        if phi.angle() >= core::f64::consts::PI {
            return Err(MotionError::AmbiguousRotation);
        }
        Ok(VelocityEstimate { phi, v })
    }

    /// Rotation vector in radians per scan period.
    #[inline]
    pub fn angular(&self) -> &RotationVector {
        &self.phi
    }

    /// Translation in meters per scan period.
    #[inline]
    pub fn translational(&self) -> Vec3 {
        self.v
    }
}

/// Per-point acquisition times as fractions of the scan period.
#[derive(Debug, Clone, PartialEq)]
pub struct TimestampVector(Vec<f64>);

impl TimestampVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self, MotionError> {
        for (index, &value) in alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(MotionError::TimestampOutOfRange { index, value });
            }
        }
        Ok(TimestampVector(alphas))
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Relative pose between the two most recent known poses:
/// rotation `R_{t−2}ᵀ R_{t−1}`, translation `R_{t−2}ᵀ (t_{t−1} − t_{t−2})`.
pub fn predict_relative_pose(pose_prev2: &Pose, pose_prev1: &Pose) -> Pose {
    let rotation = pose_prev2.rotation.inverse().compose(&pose_prev1.rotation);
    let translation = pose_prev2
        .rotation
        .apply_inverse(pose_prev1.translation - pose_prev2.translation);
    Pose { rotation, translation }
}

/// Read the per-scan velocities off a relative pose: `φ = Log(R)`, `v = t`
/// (the scan period is normalized to 1).
pub fn estimate_velocities(relative: &Pose) -> Result<VelocityEstimate, MotionError> {
    let phi = geometry::so3_log(&relative.rotation);
    VelocityEstimate::new(phi, relative.translation)
}

/// Relative timestamps from horizontal angles: `α_i = θ_i / 360` with θ in
/// `[0°, 360°)`. Points without a computable azimuth inherit the previous
/// point's angle.
pub fn relative_timestamps(cloud: &PointCloud) -> Result<TimestampVector, MotionError> {
    if cloud.is_empty() {
        return Err(MotionError::EmptyCloud);
    }
    let alphas = effective_azimuths(cloud)
        .into_iter()
        .map(|theta| theta / 360.0)
        .collect();
    TimestampVector::new(alphas)
}

/// Restore firing-time geometry: `p*_i = Exp(α_i φ)⁻¹ (p_i − α_i v)`.
///
/// Intensities, labels, and ring indices are carried through unchanged.
/// Zero velocity (or all-zero timestamps) reproduces the input bit for bit.
pub fn skew_scan(
    cloud: &PointCloud,
    vel: &VelocityEstimate,
    alpha: &TimestampVector,
) -> Result<PointCloud, MotionError> {
    if alpha.len() != cloud.len() {
        return Err(MotionError::LengthMismatch { expected: cloud.len(), got: alpha.len() });
    }
    let phi = vel.phi.vector();
    let v = vel.v;
    let positions = cloud
        .positions()
        .iter()
        .zip(alpha.as_slice())
        .map(|(&p, &a)| geometry::exp_unchecked(phi * a).apply_inverse(p - v * a))
        .collect();
    Ok(cloud.with_positions_replaced(positions))
}

/// Exact inverse of [`skew_scan`] for the same timestamps:
/// `p_i = Exp(α_i φ) p*_i + α_i v`.
///
/// Timestamps are taken explicitly rather than recomputed from azimuths:
/// the azimuth formula is defined on deskewed coordinates, so for raw input
/// the caller must supply sensor timestamps (or simulator ground truth).
pub fn deskew_scan(
    cloud: &PointCloud,
    vel: &VelocityEstimate,
    alpha: &TimestampVector,
) -> Result<PointCloud, MotionError> {
    if alpha.len() != cloud.len() {
        return Err(MotionError::LengthMismatch { expected: cloud.len(), got: alpha.len() });
    }
    let phi = vel.phi.vector();
    let v = vel.v;
    let positions = cloud
        .positions()
        .iter()
        .zip(alpha.as_slice())
        .map(|(&p, &a)| geometry::exp_unchecked(phi * a).apply(p) + v * a)
        .collect();
    Ok(cloud.with_positions_replaced(positions))
}
