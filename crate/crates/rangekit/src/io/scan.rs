//! Point cloud scan files: packed records of four little-endian f32 values
//! (x, y, z, intensity) per point, the layout KITTI-style datasets use.

use std::path::Path;

use rangekit_core::cloud::PointCloud;
use rangekit_core::geometry::Vec3;

use super::{read_file, write_atomic, FormatError};

pub struct ScanReadResult {
    pub cloud: PointCloud,
    /// Indices of points whose coordinates were NaN or infinite; their
    /// records are zeroed in the cloud (the invalid-return sentinel).
    pub quarantined: Vec<u32>,
}

/// Read a scan file, widening to f64 internally.
///
/// A byte length not divisible by 16 is a format error carrying the offset
/// of the offending tail. A zero-length file is a valid empty cloud.
pub fn read_scan(path: &Path) -> Result<ScanReadResult, FormatError> {
    let bytes = read_file(path)?;
    if bytes.len() % 16 != 0 {
        let offset = (bytes.len() / 16 * 16) as u64;
        return Err(FormatError::malformed(
            path,
            offset,
            format!("scan length {} is not a multiple of 16", bytes.len()),
        ));
    }
    let n = bytes.len() / 16;
    let mut positions = Vec::with_capacity(n);
    let mut intensities = Vec::with_capacity(n);
    let mut quarantined = Vec::new();
    for i in 0..n {
        let at = |k: usize| {
            let start = i * 16 + k * 4;
            f32::from_le_bytes(bytes[start..start + 4].try_into().unwrap()) as f64
        };
        let (x, y, z, intensity) = (at(0), at(1), at(2), at(3));
        if x.is_finite() && y.is_finite() && z.is_finite() {
            positions.push(Vec3::new(x, y, z));
            intensities.push(if intensity.is_finite() { intensity } else { 0.0 });
        } else {
            quarantined.push(i as u32);
            positions.push(Vec3::ZERO);
            intensities.push(0.0);
        }
    }
    let cloud = PointCloud::new(positions, intensities).expect("lengths equal by construction");
    Ok(ScanReadResult { cloud, quarantined })
}

/// Write a scan file, narrowing to f32 at the boundary.
pub fn write_scan(path: &Path, cloud: &PointCloud) -> Result<(), FormatError> {
    let mut bytes = Vec::with_capacity(cloud.len() * 16);
    for (p, &intensity) in cloud.positions().iter().zip(cloud.intensities()) {
        for value in [p.x, p.y, p.z, intensity] {
            bytes.extend_from_slice(&(value as f32).to_le_bytes());
        }
    }
    write_atomic(path, &bytes)
}
