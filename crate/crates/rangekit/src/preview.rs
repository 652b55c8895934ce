//! PNG rendering of a range image's range channel for visual inspection.

use std::path::Path;

use image::{Rgb, RgbImage};
use rangekit_core::projection::RangeImage;

use crate::io::FormatError;

/// Perceptually-uniform color stops (viridis-style), dark-violet to yellow.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colormap(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t as usize).min(STOPS.len() - 2);
    let frac = t - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * frac).round() as u8;
    Rgb([
        mix(STOPS[i][0], STOPS[i + 1][0]),
        mix(STOPS[i][1], STOPS[i + 1][1]),
        mix(STOPS[i][2], STOPS[i + 1][2]),
    ])
}

/// Render the range channel; invalid pixels are black, valid ranges are
/// normalized to the image's own maximum.
pub fn write_preview(path: &Path, image: &RangeImage) -> Result<(), FormatError> {
    let max_range = image
        .range
        .iter()
        .zip(&image.mask)
        .filter(|(_, &m)| m == 1)
        .map(|(&r, _)| r)
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let png = RgbImage::from_fn(image.width as u32, image.height as u32, |u, v| {
        let i = image.idx(v as usize, u as usize);
        if image.mask[i] == 1 {
            colormap(image.range[i] / max_range)
        } else {
            Rgb([0, 0, 0])
        }
    });
    png.save(path)
        .map_err(|e| FormatError::malformed(path, 0, format!("cannot write preview: {e}")))
}
