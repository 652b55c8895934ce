//! Range-image container format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic "RIMG" | u32 version=1 | u32 H | u32 W | u32 C | C channel-id bytes
//! H·W·C f32 samples, row-major pixels, channels interleaved last
//! ```
//!
//! Channel ids: 0 range, 1 x, 2 y, 3 z, 4 intensity, 5 mask, 6 label,
//! 7 filled. Channels 0–5 are mandatory; 6 and 7 are optional. Mask,
//! label, and filled are stored as exact small integers in f32.

use std::path::Path;

use rangekit_core::projection::RangeImage;

use super::{read_file, write_atomic, FormatError};

const MAGIC: &[u8; 4] = b"RIMG";
const VERSION: u32 = 1;

const CH_RANGE: u8 = 0;
const CH_X: u8 = 1;
const CH_Y: u8 = 2;
const CH_Z: u8 = 3;
const CH_INTENSITY: u8 = 4;
const CH_MASK: u8 = 5;
const CH_LABEL: u8 = 6;
const CH_FILLED: u8 = 7;

pub fn write_range_image(path: &Path, image: &RangeImage) -> Result<(), FormatError> {
    let mut ids: Vec<u8> = vec![CH_RANGE, CH_X, CH_Y, CH_Z, CH_INTENSITY, CH_MASK];
    if image.label.is_some() {
        ids.push(CH_LABEL);
    }
    ids.push(CH_FILLED);

    let n = image.pixel_count();
    let mut bytes = Vec::with_capacity(20 + ids.len() + n * ids.len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(image.height as u32).to_le_bytes());
    bytes.extend_from_slice(&(image.width as u32).to_le_bytes());
    bytes.extend_from_slice(&(ids.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&ids);
    for pixel in 0..n {
        for &id in &ids {
            let value = match id {
                CH_RANGE => image.range[pixel] as f32,
                CH_X => image.x[pixel] as f32,
                CH_Y => image.y[pixel] as f32,
                CH_Z => image.z[pixel] as f32,
                CH_INTENSITY => image.intensity[pixel] as f32,
                CH_MASK => image.mask[pixel] as f32,
                CH_LABEL => image.label.as_ref().unwrap()[pixel] as f32,
                CH_FILLED => image.filled[pixel] as f32,
                _ => unreachable!(),
            };
            bytes.extend_from_slice(&value.to_le_bytes());
        }
    }
    write_atomic(path, &bytes)
}

pub fn read_range_image(path: &Path) -> Result<RangeImage, FormatError> {
    let bytes = read_file(path)?;
    let need = |len: usize, at: u64, what: &str| -> Result<(), FormatError> {
        if bytes.len() < len {
            return Err(FormatError::malformed(path, at, format!("truncated: {what}")));
        }
        Ok(())
    };
    need(8, 0, "missing header")?;
    if &bytes[0..4] != MAGIC {
        return Err(FormatError::malformed(path, 0, "bad magic (expected RIMG)"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(FormatError::malformed(path, 4, format!("unsupported version {version}")));
    }
    need(20, 8, "missing dimensions")?;
    let height = u32_at(8) as usize;
    let width = u32_at(12) as usize;
    let channels = u32_at(16) as usize;
    need(20 + channels, 20, "missing channel ids")?;
    let ids = &bytes[20..20 + channels];
    for (i, &id) in ids.iter().enumerate() {
        if id > CH_FILLED {
            return Err(FormatError::malformed(path, (20 + i) as u64, format!("unknown channel id {id}")));
        }
        if ids[..i].contains(&id) {
            return Err(FormatError::malformed(path, (20 + i) as u64, format!("duplicate channel id {id}")));
        }
    }
    for mandatory in [CH_RANGE, CH_X, CH_Y, CH_Z, CH_INTENSITY, CH_MASK] {
        if !ids.contains(&mandatory) {
            return Err(FormatError::malformed(path, 20, format!("missing channel id {mandatory}")));
        }
    }

    let data_start = 20 + channels;
    let expect = data_start + height * width * channels * 4;
    if bytes.len() != expect {
        return Err(FormatError::malformed(
            path,
            bytes.len().min(expect) as u64,
            format!("expected {expect} bytes, file has {}", bytes.len()),
        ));
    }

    let mut image = RangeImage::empty(height, width, ids.contains(&CH_LABEL));
    let n = height * width;
    for pixel in 0..n {
        for (slot, &id) in ids.iter().enumerate() {
            let at = data_start + (pixel * channels + slot) * 4;
            let value = f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as f64;
            match id {
                CH_RANGE => image.range[pixel] = value,
                CH_X => image.x[pixel] = value,
                CH_Y => image.y[pixel] = value,
                CH_Z => image.z[pixel] = value,
                CH_INTENSITY => image.intensity[pixel] = value,
                CH_MASK => image.mask[pixel] = value as u8,
                CH_LABEL => image.label.as_mut().unwrap()[pixel] = value as u32,
                CH_FILLED => image.filled[pixel] = value as u8,
                _ => unreachable!(),
            }
        }
    }
    Ok(image)
}
