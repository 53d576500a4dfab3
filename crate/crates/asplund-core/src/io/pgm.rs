//! Portable graymap (PGM) reading and writing, P2 and P5, 8-bit only.

use std::fs;
use std::path::Path;

use super::Scanner;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::lip::GreyScale;

/// PGM encoding flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmFormat {
    /// P2, decimal sample values.
    Ascii,
    /// P5, one byte per sample.
    #[default]
    Binary,
}

/// Parses a PGM byte buffer. Accepts P2 and P5 with `maxval ≤ 255`;
/// anything else is a parse error carrying the byte offset.
pub fn read_pgm_bytes(bytes: &[u8], scale: GreyScale) -> Result<Image> {
    let mut sc = Scanner::new(bytes);
    let (magic_at, magic) = sc.token("PGM magic number")?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => {
            return Err(Error::parse(
                magic_at,
                "not a PGM file (expected magic P2 or P5)",
            ))
        }
    };
    let width = sc.usize_token("width")?;
    let height = sc.usize_token("height")?;
    if width == 0 || height == 0 {
        return Err(Error::parse(sc.pos(), "image dimensions must be positive"));
    }
    let maxval_at = sc.next_token_offset();
    let maxval = sc.usize_token("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::parse(
            maxval_at,
            format!("maxval {maxval} unsupported, this reader is 8-bit only (1..=255)"),
        ));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(maxval_at, "image dimensions overflow"))?;
    let mut values = Vec::with_capacity(count);
    if binary {
        sc.binary_payload_start()?;
        let payload_at = sc.pos();
        let payload = sc.take_bytes(count)?;
        for (i, &byte) in payload.iter().enumerate() {
            if byte as usize > maxval {
                return Err(Error::parse(
                    payload_at + i,
                    format!("sample {byte} exceeds maxval {maxval}"),
                ));
            }
            values.push(f64::from(byte));
        }
    } else {
        for _ in 0..count {
            let at = sc.next_token_offset();
            let v = sc.usize_token("sample value")?;
            if v > maxval {
                return Err(Error::parse(
                    at,
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            values.push(v as f64);
        }
    }
    sc.expect_trailing_whitespace()?;
    Image::from_vec(width, height, values, scale)
}

/// Reads a PGM file; see [`read_pgm_bytes`].
pub fn read_pgm(path: &Path, scale: GreyScale) -> Result<Image> {
    read_pgm_bytes(&fs::read(path)?, scale)
}

/// Encodes an image as PGM with maxval 255. Samples are rounded to the
/// nearest integer and clamped into `0..=255`, so integer-valued images in
/// that range round-trip losslessly.
pub fn pgm_bytes(f: &Image, format: PgmFormat) -> Vec<u8> {
    let quantize = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    let mut out = Vec::new();
    match format {
        PgmFormat::Binary => {
            out.extend_from_slice(format!("P5\n{} {}\n255\n", f.width(), f.height()).as_bytes());
            out.extend(f.values().iter().map(|&v| quantize(v)));
        }
        PgmFormat::Ascii => {
            out.extend_from_slice(format!("P2\n{} {}\n255\n", f.width(), f.height()).as_bytes());
            for row in f.values().chunks(f.width()) {
                let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

/// Writes an image as a PGM file; see [`pgm_bytes`].
pub fn write_pgm(f: &Image, path: &Path, format: PgmFormat) -> Result<()> {
    fs::write(path, pgm_bytes(f, format))?;
    Ok(())
}
