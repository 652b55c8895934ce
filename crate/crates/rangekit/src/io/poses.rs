//! Trajectory files: one pose per line as 12 whitespace-separated reals, the
//! row-major upper 3×4 of a homogeneous transform. Rotations are
//! re-orthonormalized on entry (text files carry ~7 significant digits).

use std::path::Path;

use rangekit_core::geometry::{Mat3, Pose, RotationMatrix, Vec3};

use super::FormatError;

/// Orthonormality slack accepted from parsed text before re-orthonormalization.
const POSE_ROTATION_TOL: f64 = 1e-4;

fn parse_pose_fields(path: &Path, line_no: usize, line: &str) -> Result<Pose, FormatError> {
    let fields: Vec<f64> = line
        .split_whitespace()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| FormatError::line(path, line_no, format!("bad number {f:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if fields.len() != 12 {
        return Err(FormatError::line(
            path,
            line_no,
            format!("expected 12 pose fields, found {}", fields.len()),
        ));
    }
    let m = Mat3([
        [fields[0], fields[1], fields[2]],
        [fields[4], fields[5], fields[6]],
        [fields[8], fields[9], fields[10]],
    ]);
    let rotation = RotationMatrix::orthonormalized(m, POSE_ROTATION_TOL)
        .map_err(|e| FormatError::line(path, line_no, format!("bad rotation: {e}")))?;
    let translation = Vec3::new(fields[3], fields[7], fields[11]);
    Pose::new(rotation, translation)
        .map_err(|e| FormatError::line(path, line_no, format!("bad pose: {e}")))
}

/// Read all poses in file order. Blank lines are skipped but still counted
/// for diagnostics.
pub fn read_poses(path: &Path) -> Result<Vec<Pose>, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let mut poses = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        poses.push(parse_pose_fields(path, i + 1, line)?);
    }
    Ok(poses)
}

/// Read a rigid calibration transform.
///
/// Accepts either a bare 12-field line or a KITTI-style calib.txt, where the
/// line prefixed `Tr:` holds the LiDAR-to-reference transform.
pub fn read_calibration(path: &Path) -> Result<Pose, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("Tr:") {
            return parse_pose_fields(path, i + 1, rest);
        }
        if !trimmed.contains(':') {
            return parse_pose_fields(path, i + 1, trimmed);
        }
    }
    Err(FormatError::line(path, 1, "no calibration line found (expected `Tr:` or 12 bare fields)"))
}

/// Move a trajectory pose into the sensor frame: `Tr⁻¹ · pose · Tr`.
pub fn apply_calibration(pose: &Pose, calib: &Pose) -> Pose {
    calib.inverse().compose(pose).compose(calib)
}
