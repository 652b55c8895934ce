//! Bit-exact readers and writers for every on-disk format the toolkit
//! speaks. All multi-byte values are little-endian; readers reject malformed
//! input with positional diagnostics instead of truncating silently.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

mod labels;
mod lut;
mod poses;
mod rimg;
mod scan;
mod scene;
mod sidecar;

pub use labels::{read_labels, remap_semantic_kitti, write_labels, SEMANTIC_KITTI_NUM_CLASSES};
pub use lut::{read_lut, write_lut};
pub use poses::{apply_calibration, read_calibration, read_poses};
pub use rimg::{read_range_image, write_range_image};
pub use scan::{read_scan, write_scan, ScanReadResult};
pub use scene::read_scene;
pub use sidecar::{read_alphas, read_rings, write_alphas, write_rings};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: byte {offset}: {what}")]
    Malformed {
        path: PathBuf,
        /// Byte position of the offense (for line-based formats, the line
        /// number instead; see `Line`).
        offset: u64,
        what: String,
    },
    #[error("{path}:{line}: {what}")]
    Line {
        path: PathBuf,
        line: usize,
        what: String,
    },
}

impl FormatError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn malformed(path: &Path, offset: u64, what: impl Into<String>) -> Self {
        FormatError::Malformed { path: path.to_path_buf(), offset, what: what.into() }
    }

    pub(crate) fn line(path: &Path, line: usize, what: impl Into<String>) -> Self {
        FormatError::Line { path: path.to_path_buf(), line, what: what.into() }
    }
}

/// Write `bytes` to `path` atomically: a temp file in the same directory is
/// renamed over the target, so readers never observe a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let stem = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{stem}.tmp.{}", std::process::id()));
    let mut file = fs::File::create(&tmp).map_err(|e| FormatError::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| FormatError::io(&tmp, e))?;
    file.sync_all().map_err(|e| FormatError::io(&tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| FormatError::io(path, e))?;
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, FormatError> {
    fs::read(path).map_err(|e| FormatError::io(path, e))
}

/// SHA-256 of a file, as lowercase hex.
pub fn sha256_file(path: &Path) -> Result<String, FormatError> {
    use sha2::{Digest, Sha256};
    let bytes = read_file(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
