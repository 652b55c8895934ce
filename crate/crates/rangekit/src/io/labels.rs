//! Per-point label files: one little-endian u32 per point, semantic class in
//! the low 16 bits and instance id in the high 16 bits.

use std::path::Path;

use super::{read_file, write_atomic, FormatError};

/// Read raw label words (semantic + instance packed).
pub fn read_labels(path: &Path) -> Result<Vec<u32>, FormatError> {
    let bytes = read_file(path)?;
    if bytes.len() % 4 != 0 {
        let offset = (bytes.len() / 4 * 4) as u64;
        return Err(FormatError::malformed(
            path,
            offset,
            format!("label length {} is not a multiple of 4", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn write_labels(path: &Path, labels: &[u32]) -> Result<(), FormatError> {
    let mut bytes = Vec::with_capacity(labels.len() * 4);
    for &label in labels {
        bytes.extend_from_slice(&label.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

/// Class count of the 19-class single-scan benchmark plus the ignored
/// class 0.
pub const SEMANTIC_KITTI_NUM_CLASSES: usize = 20;

/// Map a raw SemanticKITTI label word to the 19-class single-scan training
/// ids (0 = ignored). The instance bits are discarded first; unknown ids
/// map to 0. This table is benchmark tooling, shipped for convenience.
pub fn remap_semantic_kitti(raw: u32) -> u32 {
    match raw & 0xffff {
        10 | 252 => 1,          // car (incl. moving)
        11 => 2,                // bicycle
        15 => 3,                // motorcycle
        18 | 258 => 4,          // truck
        13 | 16 | 20 | 256 | 257 | 259 => 5, // other-vehicle
        30 | 254 => 6,          // person
        31 | 253 => 7,          // bicyclist
        32 | 255 => 8,          // motorcyclist
        40 | 60 => 9,           // road (incl. lane marking)
        44 => 10,               // parking
        48 => 11,               // sidewalk
        49 => 12,               // other-ground
        50 => 13,               // building
        51 => 14,               // fence
        70 => 15,               // vegetation
        71 => 16,               // trunk
        72 => 17,               // terrain
        80 => 18,               // pole
        81 => 19,               // traffic-sign
        _ => 0,                 // unlabeled / outlier / other
    }
}
