//! On-disk formats for run artifacts.
//!
//! Complex matrices use a small self-describing binary layout ("CQ64"):
//! a 4-byte magic, a format version, an element-type tag, the shape, and
//! row-major interleaved re/im little-endian f64 payload. Images are
//! plain ASCII graymaps (P2) normalized to the global maximum.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::{CMatrix, CVector};

const MAGIC: &[u8; 4] = b"CQ64";
const VERSION: u16 = 1;
const DTYPE_C128: u8 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a CQ64 file (bad magic)")]
    BadMagic,
    #[error("unsupported CQ64 version {0}")]
    BadVersion(u16),
    #[error("unsupported element type tag {0}")]
    BadDtype(u8),
    #[error("file ends before the declared {rows}x{cols} payload")]
    Truncated { rows: u64, cols: u64 },
    #[error("{0}")]
    InvalidInput(String),
}

/// Writes a complex matrix in the CQ64 layout.
pub fn write_complex_matrix(path: &Path, m: &CMatrix) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[DTYPE_C128])?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a CQ64 complex matrix.
pub fn read_complex_matrix(path: &Path) -> Result<CMatrix, IoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(IoError::BadMagic);
    }
    let mut two = [0u8; 2];
    r.read_exact(&mut two)?;
    let version = u16::from_le_bytes(two);
    if version != VERSION {
        return Err(IoError::BadVersion(version));
    }
    let mut one = [0u8; 1];
    r.read_exact(&mut one)?;
    if one[0] != DTYPE_C128 {
        return Err(IoError::BadDtype(one[0]));
    }
    let mut eight = [0u8; 8];
    r.read_exact(&mut eight)?;
    let rows = u64::from_le_bytes(eight);
    r.read_exact(&mut eight)?;
    let cols = u64::from_le_bytes(eight);
    let count = rows
        .checked_mul(cols)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(IoError::Truncated { rows, cols })?;
    let mut payload = vec![0u8; count * 16];
    r.read_exact(&mut payload).map_err(|_| IoError::Truncated { rows, cols })?;
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[0..8].try_into().expect("8-byte chunk"));
            let im = f64::from_le_bytes(c[8..16].try_into().expect("8-byte chunk"));
            Complex64::new(re, im)
        })
        .collect();
    // Payload is row-major; DMatrix::from_vec is column-major.
    let m = DMatrix::from_vec(cols as usize, rows as usize, values).transpose();
    Ok(m)
}

/// Writes a complex vector as an n×1 CQ64 matrix.
pub fn write_complex_vector(path: &Path, v: &CVector) -> Result<(), IoError> {
    let m = CMatrix::from_fn(v.len(), 1, |i, _| v[i]);
    write_complex_matrix(path, &m)
}

/// Reads a CQ64 file holding a single column (or row) as a vector.
pub fn read_complex_vector(path: &Path) -> Result<CVector, IoError> {
    let m = read_complex_matrix(path)?;
    if m.ncols() != 1 && m.nrows() != 1 {
        return Err(IoError::InvalidInput(format!(
            "{}x{} matrix is not a vector",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(CVector::from_fn(m.len(), |i, _| m[if m.ncols() == 1 { (i, 0) } else { (0, i) }]))
}

/// Writes a modulus image as an ASCII P2 graymap, normalized so the
/// global maximum maps to 255. An all-zero image stays all zeros.
pub fn write_pgm(path: &Path, image: &DMatrix<f64>) -> Result<(), IoError> {
    if image.is_empty() {
        return Err(IoError::InvalidInput("empty image".into()));
    }
    if image.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(IoError::InvalidInput("image must be finite and non-negative".into()));
    }
    let peak = image.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "P2")?;
    writeln!(w, "{} {}", image.ncols(), image.nrows())?;
    writeln!(w, "255")?;
    for i in 0..image.nrows() {
        let row: Vec<String> = (0..image.ncols())
            .map(|j| {
                let v = if peak > 0.0 { (image[(i, j)] / peak * 255.0).round() as u32 } else { 0 };
                v.to_string()
            })
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip_preserves_every_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.cq64");
        let m = CMatrix::from_fn(3, 5, |i, j| {
            Complex64::new(i as f64 * 1.25 - 2.0, (j as f64).sqrt() * -0.75)
        });
        write_complex_matrix(&path, &m).unwrap();
        let back = read_complex_matrix(&path).unwrap();
        assert_eq!(m.nrows(), back.nrows());
        assert_eq!(m.ncols(), back.ncols());
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn vector_roundtrip_and_shape_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.cq64");
        let v = CVector::from_fn(7, |i, _| Complex64::new(i as f64, -(i as f64) / 3.0));
        write_complex_vector(&path, &v).unwrap();
        let back = read_complex_vector(&path).unwrap();
        assert_eq!(v, back);

        let wide = CMatrix::from_element(2, 3, Complex64::new(1.0, 0.0));
        let path2 = dir.path().join("m.cq64");
        write_complex_matrix(&path2, &wide).unwrap();
        assert!(matches!(read_complex_vector(&path2), Err(IoError::InvalidInput(_))));
    }

    #[test]
    fn malformed_headers_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cq64");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(matches!(read_complex_matrix(&path), Err(IoError::BadMagic) | Err(IoError::Io(_))));

        // Valid header, truncated payload.
        let path2 = dir.path().join("short.cq64");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&VERSION.to_le_bytes());
        bytes.push(DTYPE_C128);
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&[0u8; 16]);
        std::fs::write(&path2, bytes).unwrap();
        assert!(matches!(read_complex_matrix(&path2), Err(IoError::Truncated { .. })));
    }

    #[test]
    fn pgm_is_normalized_ascii() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let image = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, 4.0, 3.0, 0.5]);
        write_pgm(&path, &image).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "P2\n3 2\n255\n0 64 128\n255 191 32\n");

        let dark = DMatrix::zeros(2, 2);
        let path2 = dir.path().join("dark.pgm");
        write_pgm(&path2, &dark).unwrap();
        let text2 = std::fs::read_to_string(&path2).unwrap();
        assert_eq!(text2, "P2\n2 2\n255\n0 0\n0 0\n");
    }
}
