//! Per-point sidecar files that augment a scan:
//!
//! * ring file — one little-endian u16 ring index per point (for sources
//!   that lack a native ring field);
//! * alpha file — one little-endian f32 per point, the firing time as a
//!   revolution fraction in `[0, 1]`.

use std::path::Path;

use super::{read_file, write_atomic, FormatError};

pub fn read_rings(path: &Path) -> Result<Vec<u16>, FormatError> {
    let bytes = read_file(path)?;
    if bytes.len() % 2 != 0 {
        return Err(FormatError::malformed(
            path,
            (bytes.len() - 1) as u64,
            format!("ring file length {} is not a multiple of 2", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn write_rings(path: &Path, rings: &[u16]) -> Result<(), FormatError> {
    let mut bytes = Vec::with_capacity(rings.len() * 2);
    for &r in rings {
        bytes.extend_from_slice(&r.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

pub fn read_alphas(path: &Path) -> Result<Vec<f64>, FormatError> {
    let bytes = read_file(path)?;
    if bytes.len() % 4 != 0 {
        return Err(FormatError::malformed(
            path,
            (bytes.len() / 4 * 4) as u64,
            format!("alpha file length {} is not a multiple of 4", bytes.len()),
        ));
    }
    let alphas: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    for (i, &a) in alphas.iter().enumerate() {
        if !(0.0..=1.0).contains(&a) {
            return Err(FormatError::malformed(
                path,
                (i * 4) as u64,
                format!("alpha {a} outside [0, 1]"),
            ));
        }
    }
    Ok(alphas)
}

pub fn write_alphas(path: &Path, alphas: &[f64]) -> Result<(), FormatError> {
    let mut bytes = Vec::with_capacity(alphas.len() * 4);
    for &a in alphas {
        bytes.extend_from_slice(&(a as f32).to_le_bytes());
    }
    write_atomic(path, &bytes)
}
