//! IDX container format used by the MNIST distribution.
//!
//! All header integers are big-endian `u32`:
//!
//! ```text
//! images: 0x00000803 | count | rows | cols | count*rows*cols unsigned bytes (row-major)
//! labels: 0x00000801 | count | count unsigned bytes
//! ```
//!
//! Files may be stored gzip-compressed; [`read_possibly_gzipped`] detects the
//! `1f 8b` prefix.

use std::fs;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let n = self.rows * self.cols;
        &self.pixels[i * n..(i + 1) * n]
    }
}

fn fmt_err(kind: &'static str, reason: impl Into<String>) -> Error {
    Error::Format { kind, reason: reason.into() }
}

fn be_u32(bytes: &[u8], at: usize, kind: &'static str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| fmt_err(kind, format!("truncated header ({} bytes)", bytes.len())))
}

pub fn parse_images(bytes: &[u8]) -> Result<IdxImages> {
    const KIND: &str = "IDX images";
    let magic = be_u32(bytes, 0, KIND)?;
    if magic != IMAGES_MAGIC {
        return Err(fmt_err(KIND, format!("bad magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}")));
    }
    let count = be_u32(bytes, 4, KIND)? as usize;
    let rows = be_u32(bytes, 8, KIND)? as usize;
    let cols = be_u32(bytes, 12, KIND)? as usize;
    let body = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| fmt_err(KIND, "image dimensions overflow"))?;
    let have = bytes.len() - 16;
    if have < body {
        return Err(fmt_err(KIND, format!("truncated: header promises {body} pixel bytes, found {have}")));
    }
    if have > body {
        return Err(fmt_err(KIND, format!("{} trailing bytes after {count} images", have - body)));
    }
    Ok(IdxImages { count, rows, cols, pixels: bytes[16..].to_vec() })
}

pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    const KIND: &str = "IDX labels";
    let magic = be_u32(bytes, 0, KIND)?;
    if magic != LABELS_MAGIC {
        return Err(fmt_err(KIND, format!("bad magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}")));
    }
    let count = be_u32(bytes, 4, KIND)? as usize;
    let have = bytes.len() - 8;
    if have != count {
        return Err(fmt_err(
            KIND,
            if have < count {
                format!("truncated: header promises {count} labels, found {have}")
            } else {
                format!("{} trailing bytes after {count} labels", have - count)
            },
        ));
    }
    Ok(bytes[8..].to_vec())
}

pub fn encode_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGES_MAGIC, images.count as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Reads a file, transparently inflating it when it starts with the gzip magic.
pub fn read_possibly_gzipped(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| fmt_err("gzip", format!("{}: {e}", path.display())))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_big_endian() {
        let enc = encode_images(&IdxImages { count: 1, rows: 1, cols: 2, pixels: vec![7, 9] });
        assert_eq!(enc, [0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 2, 7, 9]);
        assert_eq!(encode_labels(&[3]), [0, 0, 8, 1, 0, 0, 0, 1, 3]);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut enc = encode_labels(&[1, 2, 3]);
        assert!(parse_labels(&enc[..10]).is_err());
        enc[3] = 0x03;
        assert!(matches!(parse_labels(&enc), Err(Error::Format { .. })));
        let imgs = encode_images(&IdxImages { count: 2, rows: 2, cols: 2, pixels: vec![0; 8] });
        assert!(parse_images(&imgs[..20]).is_err());
        assert!(parse_images(&imgs[..5]).is_err());
        assert!(parse_images(&encode_labels(&[1])).is_err());
    }

    proptest! {
        #[test]
        fn images_round_trip(count in 0usize..4, rows in 1usize..5, cols in 1usize..5, seed in any::<u8>()) {
            let pixels: Vec<u8> = (0..count * rows * cols).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
            let bytes = encode_images(&IdxImages { count, rows, cols, pixels });
            let parsed = parse_images(&bytes).unwrap();
            prop_assert_eq!(encode_images(&parsed), bytes);
        }

        #[test]
        fn labels_round_trip(labels in proptest::collection::vec(0u8..10, 0..50)) {
            let bytes = encode_labels(&labels);
            prop_assert_eq!(parse_labels(&bytes).unwrap(), labels);
        }
    }
}
