//! Distance-map export and import.
//!
//! The float grid goes into a PFM (portable floatmap): 32-bit samples,
//! scanlines stored bottom-up, scale header `-1.0` marking little-endian.
//! Distances can be legitimately infinite, so invalid pixels are encoded as
//! +∞ in the grid and the authoritative validity mask travels as a sidecar
//! PGM (`<map>.mask.pgm`, 255 = valid). An optional third artifact is an
//! 8-bit visualization PGM, min-max normalized over the valid finite values;
//! it is for eyeballs only and is never read back.

use std::fs;
use std::path::{Path, PathBuf};

use super::pgm::{read_pgm, write_pgm, PgmFormat};
use super::Scanner;
use crate::asplund::DistanceMap;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::Image;
use crate::lip::GreyScale;

/// Where the validity mask of the map at `path` lives.
pub fn mask_sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".mask.pgm");
    path.with_file_name(name)
}

/// Encodes the float grid as PFM bytes (header plus little-endian rows,
/// bottom row first). Invalid pixels become +∞.
pub fn pfm_bytes(map: &DistanceMap) -> Vec<u8> {
    let (width, height) = (map.width(), map.height());
    let mut out = format!("Pf\n{width} {height}\n-1.0\n").into_bytes();
    out.reserve(width * height * 4);
    for y in (0..height).rev() {
        for x in 0..width {
            let v = if map.is_valid(x, y) {
                map.get(x, y) as f32
            } else {
                f32::INFINITY
            };
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// The 8-bit visualization of a map: valid finite values min-max normalized
/// to `0..=255`, valid infinities pinned at 255, invalid pixels at 0. An
/// all-invalid (or all-infinite) map renders all 0.
pub fn viz_image(map: &DistanceMap) -> Image {
    let range = map.field().finite_range();
    Image::from_fn(map.width(), map.height(), GreyScale::default(), |x, y| {
        if !map.is_valid(x, y) {
            return 0.0;
        }
        let v = map.get(x, y);
        if v.is_infinite() {
            return 255.0;
        }
        match range {
            Some((lo, hi)) if hi > lo => (255.0 * (v - lo) / (hi - lo)).round(),
            _ => 0.0,
        }
    })
    .expect("visualization values stay in 0..=255")
}

/// Writes the map as PFM plus its validity-mask sidecar, and optionally an
/// 8-bit visualization PGM.
pub fn write_map(map: &DistanceMap, path: &Path, viz: Option<&Path>) -> Result<()> {
    fs::write(path, pfm_bytes(map))?;
    let mask = Image::from_vec(
        map.width(),
        map.height(),
        map.field()
            .valid_mask()
            .iter()
            .map(|&ok| if ok { 255.0 } else { 0.0 })
            .collect(),
        GreyScale::default(),
    )?;
    write_pgm(&mask, &mask_sidecar_path(path), PgmFormat::Binary)?;
    if let Some(viz_path) = viz {
        write_pgm(&viz_image(map), viz_path, PgmFormat::Binary)?;
    }
    Ok(())
}

/// Parses PFM bytes into a field, honoring the endianness declared by the
/// sign of the scale header. Greyscale `Pf` only; every pixel comes back
/// valid (masks are applied by [`read_map`]).
pub fn read_pfm_bytes(bytes: &[u8]) -> Result<Field> {
    let mut sc = Scanner::new(bytes);
    let (magic_at, magic) = sc.token("PFM magic number")?;
    match magic {
        b"Pf" => {}
        b"PF" => {
            return Err(Error::parse(
                magic_at,
                "colour floatmap (PF) unsupported, expected greyscale Pf",
            ))
        }
        _ => return Err(Error::parse(magic_at, "not a PFM file (expected Pf)")),
    }
    let width = sc.usize_token("width")?;
    let height = sc.usize_token("height")?;
    let scale_at = sc.next_token_offset();
    let scale = sc.f64_token("scale")?;
    if scale == 0.0 || scale.is_nan() {
        return Err(Error::parse(scale_at, "scale must be a nonzero real"));
    }
    let little_endian = scale < 0.0;
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::parse(scale_at, "image dimensions overflow"))?;
    sc.binary_payload_start()?;
    let payload = sc.take_bytes(count)?;
    sc.expect_trailing_whitespace()?;
    let mut values = vec![0.0f64; width * height];
    for (row_idx, row) in payload.chunks_exact(width * 4).enumerate() {
        let y = height - 1 - row_idx;
        for (x, quad) in row.chunks_exact(4).enumerate() {
            let raw = [quad[0], quad[1], quad[2], quad[3]];
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            values[y * width + x] = f64::from(v);
        }
    }
    Field::all_valid(width, height, values)
}

/// Reads a map back: the PFM grid plus, when the sidecar mask exists, its
/// validity; otherwise every finite pixel counts as valid. The discard
/// fraction is not stored in the file, so the result reports tolerance 0.
pub fn read_map(path: &Path) -> Result<DistanceMap> {
    let raw = read_pfm_bytes(&fs::read(path)?)?;
    let mask_path = mask_sidecar_path(path);
    let valid: Vec<bool> = if mask_path.exists() {
        let mask = read_pgm(&mask_path, GreyScale::default())?;
        if mask.width() != raw.width() || mask.height() != raw.height() {
            return Err(Error::Shape(format!(
                "mask sidecar is {}x{} but the map is {}x{}",
                mask.width(),
                mask.height(),
                raw.width(),
                raw.height()
            )));
        }
        mask.values().iter().map(|&v| v > 0.0).collect()
    } else {
        raw.values().iter().map(|v| v.is_finite()).collect()
    };
    let field = Field::new(raw.width(), raw.height(), raw.values().to_vec(), valid)?;
    DistanceMap::new(field, 0.0)
}
