use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use super::IoError;

pub const DENSE_MAGIC: &[u8; 4] = b"L0PK";
pub const DENSE_VERSION: u32 = 1;
const HEADER_LEN: u64 = 16;

/// Header `"L0PK"`, then version, rows, cols as little-endian `u32`, then the
/// entries in row-major order as little-endian `f64`.
pub fn write_dense_matrix<W: Write>(mut w: W, a: ArrayView2<'_, f64>) -> std::io::Result<()> {
    let (rows, cols) = a.dim();
    let too_big = || std::io::Error::new(std::io::ErrorKind::InvalidInput, format!("{rows} x {cols} exceeds u32 dimensions"));
    let rows32 = u32::try_from(rows).map_err(|_| too_big())?;
    let cols32 = u32::try_from(cols).map_err(|_| too_big())?;
    w.write_all(DENSE_MAGIC)?;
    w.write_all(&DENSE_VERSION.to_le_bytes())?;
    w.write_all(&rows32.to_le_bytes())?;
    w.write_all(&cols32.to_le_bytes())?;
    for v in a.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_dense_matrix<R: Read>(mut r: R) -> Result<Array2<f64>, IoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| IoError::io(Path::new("<reader>"), e))?;
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<Array2<f64>, IoError> {
    if bytes.len() < 4 || &bytes[..4] != DENSE_MAGIC {
        return Err(IoError::BadMagic);
    }
    if (bytes.len() as u64) < HEADER_LEN {
        return Err(IoError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len() as u64,
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4-byte slice"));
    let version = word(4);
    if version != DENSE_VERSION {
        return Err(IoError::UnsupportedVersion(version));
    }
    let (rows, cols) = (word(8) as u64, word(12) as u64);
    let overflow = IoError::DimensionOverflow { rows, cols };
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| b.checked_add(HEADER_LEN))
        .filter(|&total| usize::try_from(total).is_ok())
        .ok_or(overflow)?;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(IoError::Truncated {
            expected: expected - HEADER_LEN,
            found: found - HEADER_LEN,
        });
    }
    if found > expected {
        return Err(IoError::TrailingBytes { extra: found - expected });
    }
    let data: Vec<f64> = bytes[HEADER_LEN as usize..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(Array2::from_shape_vec((rows as usize, cols as usize), data).expect("length checked against header"))
}

pub fn save_dense_matrix(path: impl AsRef<Path>, a: ArrayView2<'_, f64>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    write_dense_matrix(BufWriter::new(file), a).map_err(|e| IoError::io(path, e))
}

pub fn load_dense_matrix(path: impl AsRef<Path>) -> Result<Array2<f64>, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    decode(&bytes)
}
