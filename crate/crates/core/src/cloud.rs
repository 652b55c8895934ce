//! Point cloud container: per-point positions plus the optional attributes
//! the pipeline carries through (intensity, semantic label, ring index, and
//! the sensor-reported azimuth when a source provides one).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub enum CloudError {
    /// An attribute array does not match the position count.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for CloudError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CloudError::LengthMismatch { expected, got } => {
                write!(f, "attribute length {got} does not match point count {expected}")
            }
        }
    }
}

/// One LiDAR scan in storage order.
///
/// Positions are meters in the sensor frame. All attribute arrays are
/// index-aligned with `positions`; the zero position is the conventional
/// sentinel for an invalid return.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    positions: Vec<Vec3>,
    intensities: Vec<f64>,
    labels: Option<Vec<u32>>,
    rings: Option<Vec<u16>>,
    /// Sensor-reported horizontal angles in `[0, 360)` degrees. When absent,
    /// consumers derive azimuths from the coordinates.
    azimuths_deg: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(positions: Vec<Vec3>, intensities: Vec<f64>) -> Result<Self, CloudError> {
        if intensities.len() != positions.len() {
            return Err(CloudError::LengthMismatch {
                expected: positions.len(),
                got: intensities.len(),
            });
        }
        Ok(PointCloud {
            positions,
            intensities,
            labels: None,
            rings: None,
            azimuths_deg: None,
        })
    }

    /// Build a cloud with zeroed intensities.
    pub fn from_positions(positions: Vec<Vec3>) -> Self {
        let intensities = vec![0.0; positions.len()];
        PointCloud {
            positions,
            intensities,
            labels: None,
            rings: None,
            azimuths_deg: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<u32>) -> Result<Self, CloudError> {
        if labels.len() != self.positions.len() {
            return Err(CloudError::LengthMismatch {
                expected: self.positions.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_rings(mut self, rings: Vec<u16>) -> Result<Self, CloudError> {
        if rings.len() != self.positions.len() {
            return Err(CloudError::LengthMismatch {
                expected: self.positions.len(),
                got: rings.len(),
            });
        }
        self.rings = Some(rings);
        Ok(self)
    }

    pub fn with_azimuths_deg(mut self, azimuths: Vec<f64>) -> Result<Self, CloudError> {
        if azimuths.len() != self.positions.len() {
            return Err(CloudError::LengthMismatch {
                expected: self.positions.len(),
                got: azimuths.len(),
            });
        }
        self.azimuths_deg = Some(azimuths);
        Ok(self)
    }

    pub fn clear_labels(&mut self) {
        self.labels = None;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    #[inline]
    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    #[inline]
    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn rings(&self) -> Option<&[u16]> {
        self.rings.as_deref()
    }

    #[inline]
    pub fn azimuths_deg(&self) -> Option<&[f64]> {
        self.azimuths_deg.as_deref()
    }

    /// Clone of this cloud with `positions` swapped out; attributes are
    /// carried over unchanged except stored azimuths, which are dropped
    /// because they describe the old coordinates.
    pub(crate) fn with_positions_replaced(&self, positions: Vec<Vec3>) -> PointCloud {
        debug_assert_eq!(positions.len(), self.positions.len());
        PointCloud {
            positions,
            intensities: self.intensities.clone(),
            labels: self.labels.clone(),
            rings: self.rings.clone(),
            azimuths_deg: None,
        }
    }
}

/// Azimuths computed from coordinates in storage order.
///
/// Degenerate points (x = y = 0) inherit the previous point's angle so that
/// zero-distance sentinels do not fragment rings; a degenerate first point
/// gets 0°, the theoretical start of a revolution.
pub(crate) fn computed_azimuths(positions: &[Vec3]) -> Vec<f64> {
    let mut out = Vec::with_capacity(positions.len());
    let mut prev = 0.0;
    for p in positions {
        let theta = crate::geometry::azimuth_deg(*p).unwrap_or(prev);
        out.push(theta);
        prev = theta;
    }
    out
}

/// The azimuth sequence consumers should trust: sensor-reported angles when
/// the cloud carries them, otherwise angles derived from the coordinates.
pub(crate) fn effective_azimuths(cloud: &PointCloud) -> Vec<f64> {
    match cloud.azimuths_deg() {
        Some(stored) => stored.to_vec(),
        None => computed_azimuths(cloud.positions()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_points_inherit_the_previous_azimuth() {
        let az = computed_azimuths(&[
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::ZERO,
            Vec3::new(-1.0, 0.0, 0.0),
        ]);
        assert_eq!(az, vec![45.0, 45.0, 180.0]);
        // Degenerate first point starts at zero.
        assert_eq!(computed_azimuths(&[Vec3::ZERO])[0], 0.0);
    }

    #[test]
    fn attribute_lengths_are_enforced() {
        let cloud = PointCloud::from_positions(vec![Vec3::ZERO; 3]);
        assert!(cloud.clone().with_labels(vec![1, 2, 3]).is_ok());
        assert!(matches!(
            cloud.clone().with_labels(vec![1, 2]),
            Err(CloudError::LengthMismatch { expected: 3, got: 2 })
        ));
        assert!(cloud.clone().with_rings(vec![0; 4]).is_err());
        assert!(PointCloud::new(vec![Vec3::ZERO; 2], vec![0.0]).is_err());
    }
}
