//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `LERA` |
//! | 4     | format version (`u32`, currently 1) |
//! | 8     | truncation `n` (`u64`) |
//! | 5 × 8 | `ν, α, θ₁, θ₂, t` (`f64`) |
//! | 48 per mode | stored half-lattice in lexicographic `k` order; per mode the three components as `(re, im)` `f64` pairs |

use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result, SnapshotError};
use crate::spectral::{Lattice, SpectralField};

pub const MAGIC: [u8; 4] = *b"LERA";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 5 * 8;
const BYTES_PER_MODE: usize = 3 * 2 * 8;
/// Largest truncation accepted by the reader.
const MAX_TRUNCATION: u64 = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotMeta {
    pub nu: f64,
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub t: f64,
}

pub fn encode_snapshot(field: &SpectralField<f64>, meta: &SnapshotMeta) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + field.len() * BYTES_PER_MODE);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(field.truncation() as u64).to_le_bytes());
    for x in [meta.nu, meta.alpha, meta.theta1, meta.theta2, meta.t] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for i in 0..field.len() {
        for z in field.at(i) {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<(SpectralField<f64>, SnapshotMeta), SnapshotError> {
    if bytes.len() < 4 {
        return Err(SnapshotError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4-byte slice");
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic { found: magic });
    }
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4-byte slice"));
    if version != VERSION {
        return Err(SnapshotError::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8-byte slice"));
    if n == 0 || n > MAX_TRUNCATION {
        return Err(SnapshotError::Malformed(format!("truncation {n} out of range")));
    }
    let meta = SnapshotMeta {
        nu: f64_at(bytes, 16),
        alpha: f64_at(bytes, 24),
        theta1: f64_at(bytes, 32),
        theta2: f64_at(bytes, 40),
        t: f64_at(bytes, 48),
    };
    let lattice = Lattice::shared(n as usize);
    let expected = HEADER_LEN + lattice.len() * BYTES_PER_MODE;
    if bytes.len() < expected {
        return Err(SnapshotError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(SnapshotError::Malformed(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let mut comps: [Vec<Complex<f64>>; 3] = Default::default();
    for c in &mut comps {
        c.reserve_exact(lattice.len());
    }
    for i in 0..lattice.len() {
        let base = HEADER_LEN + i * BYTES_PER_MODE;
        for (j, c) in comps.iter_mut().enumerate() {
            let at = base + j * 16;
            c.push(Complex::new(f64_at(bytes, at), f64_at(bytes, at + 8)));
        }
    }
    let field = SpectralField::from_components(lattice, comps).map_err(|e| SnapshotError::Malformed(e.to_string()))?;
    Ok((field, meta))
}

pub fn write_snapshot(field: &SpectralField<f64>, meta: &SnapshotMeta, path: &Path) -> Result<()> {
    std::fs::write(path, encode_snapshot(field, meta)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<(SpectralField<f64>, SnapshotMeta)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode_snapshot(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;

    fn meta() -> SnapshotMeta {
        SnapshotMeta {
            nu: 0.1,
            alpha: 0.5,
            theta1: 0.25,
            theta2: 1.0,
            t: 0.3,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let u = random_field::<f64>(3, 5, 1.0).unwrap();
        let bytes = encode_snapshot(&u, &meta());
        assert_eq!(bytes.len(), HEADER_LEN + u.len() * BYTES_PER_MODE);
        let (v, m) = decode_snapshot(&bytes).unwrap();
        assert_eq!(m, meta());
        for i in 0..u.len() {
            for j in 0..3 {
                assert_eq!(u.at(i)[j].re.to_bits(), v.at(i)[j].re.to_bits());
                assert_eq!(u.at(i)[j].im.to_bits(), v.at(i)[j].im.to_bits());
            }
        }
    }

    #[test]
    fn corrupt_files_rejected() {
        let u = random_field::<f64>(2, 1, 1.0).unwrap();
        let bytes = encode_snapshot(&u, &meta());
        assert!(matches!(
            decode_snapshot(&bytes[..bytes.len() - 1]),
            Err(SnapshotError::Truncated { .. })
        ));
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode_snapshot(&bad), Err(SnapshotError::BadMagic { found }) if &found == b"XXXX"));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(
            decode_snapshot(&bad),
            Err(SnapshotError::VersionMismatch { found: 2, .. })
        ));
        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(decode_snapshot(&bad), Err(SnapshotError::Malformed(_))));
        let mut bad = bytes;
        bad[8..16].copy_from_slice(&0u64.to_le_bytes());
        assert!(matches!(decode_snapshot(&bad), Err(SnapshotError::Malformed(_))));
    }
}
