//! EMB1 binary format.
//!
//! All integers and floats are little-endian:
//!
//! | offset | size    | field                          |
//! |--------|---------|--------------------------------|
//! | 0      | 4       | magic `b"EMB1"`                |
//! | 4      | 4       | version `u32` = 1              |
//! | 8      | 4       | n `u32`                        |
//! | 12     | 4       | d `u32`                        |
//! | 16     | 4       | n_classes `u32`                |
//! | 20     | 4·n·d   | embeddings `f32`, row-major    |
//! | …      | 4·n     | labels `u32`                   |

use std::fs;
use std::path::Path;

use super::EmbeddingSet;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"EMB1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;

/// Total file size for a set with `n` rows of width `d`.
pub fn encoded_len(n: usize, d: usize) -> usize {
    HEADER_LEN + 4 * n * d + 4 * n
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("{what} {v} exceeds u32")))
}

pub fn encode(set: &EmbeddingSet) -> Result<Vec<u8>> {
    let (n, d) = (set.len(), set.dim());
    let mut out = Vec::with_capacity(encoded_len(n, d));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(n, "row count")?.to_le_bytes());
    out.extend_from_slice(&to_u32(d, "dimension")?.to_le_bytes());
    out.extend_from_slice(&to_u32(set.n_classes(), "class count")?.to_le_bytes());
    for (k, &v) in set.features().iter().enumerate() {
        let f = v as f32;
        if !f.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "embedding {v} in row {} does not fit in f32",
                k / d.max(1)
            )));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    for &label in set.labels() {
        out.extend_from_slice(&to_u32(label, "label")?.to_le_bytes());
    }
    Ok(out)
}

/// Parses an EMB1 buffer. Never panics on malformed input.
pub fn decode(bytes: &[u8]) -> Result<EmbeddingSet> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(Error::BadMagic(bytes[..4].try_into().expect("4 bytes")));
        }
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = read_u32(bytes, 8) as usize;
    let d = read_u32(bytes, 12) as usize;
    let n_classes = read_u32(bytes, 16) as usize;
    if n_classes == 0 {
        return Err(Error::Malformed("n_classes must be positive".into()));
    }

    let expected = n
        .checked_mul(d)
        .and_then(|nd| nd.checked_add(n))
        .and_then(|words| words.checked_mul(4))
        .and_then(|payload| payload.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Malformed(format!("header sizes overflow (n {n}, d {d})")))?;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::Malformed(format!(
            "{} trailing bytes after labels",
            bytes.len() - expected
        )));
    }

    let labels_at = HEADER_LEN + 4 * n * d;
    let mut x = Vec::with_capacity(n * d);
    for (k, chunk) in bytes[HEADER_LEN..labels_at].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        if !v.is_finite() {
            return Err(Error::Malformed(format!(
                "non-finite embedding in row {}",
                k / d.max(1)
            )));
        }
        x.push(v as f64);
    }
    let mut y = Vec::with_capacity(n);
    for (row, chunk) in bytes[labels_at..].chunks_exact(4).enumerate() {
        let label = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk")) as usize;
        if label >= n_classes {
            return Err(Error::LabelOutOfRange {
                row,
                label,
                n_classes,
            });
        }
        y.push(label);
    }
    EmbeddingSet::new("", d, n_classes, x, y)
}

pub fn save_emb(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(set)?)?;
    Ok(())
}

pub fn load_emb(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(decode(&bytes)?.with_name(name))
}
