//! Look-up table files:
//!
//! ```text
//! magic "RLUT" | u32 version=1 | u32 N | N × (u32 point_index, u32 v, u32 u)
//! ```

use std::path::Path;

use rangekit_core::projection::LookUpTable;

use super::{read_file, write_atomic, FormatError};

const MAGIC: &[u8; 4] = b"RLUT";
const VERSION: u32 = 1;

pub fn write_lut(path: &Path, lut: &LookUpTable) -> Result<(), FormatError> {
    let n = lut.len();
    let mut bytes = Vec::with_capacity(12 + n * 12);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    for i in 0..n {
        bytes.extend_from_slice(&lut.point_index[i].to_le_bytes());
        bytes.extend_from_slice(&lut.v[i].to_le_bytes());
        bytes.extend_from_slice(&lut.u[i].to_le_bytes());
    }
    write_atomic(path, &bytes)
}

pub fn read_lut(path: &Path) -> Result<LookUpTable, FormatError> {
    let bytes = read_file(path)?;
    if bytes.len() < 12 {
        return Err(FormatError::malformed(path, 0, "truncated header"));
    }
    if &bytes[0..4] != MAGIC {
        return Err(FormatError::malformed(path, 0, "bad magic (expected RLUT)"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::malformed(path, 4, format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expect = 12 + n * 12;
    if bytes.len() != expect {
        return Err(FormatError::malformed(
            path,
            bytes.len().min(expect) as u64,
            format!("expected {expect} bytes for {n} records, file has {}", bytes.len()),
        ));
    }
    let mut lut = LookUpTable::with_capacity(n);
    for i in 0..n {
        let at = 12 + i * 12;
        let field = |k: usize| u32::from_le_bytes(bytes[at + k * 4..at + k * 4 + 4].try_into().unwrap());
        lut.point_index.push(field(0));
        lut.v.push(field(1));
        lut.u.push(field(2));
    }
    Ok(lut)
}
