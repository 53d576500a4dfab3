//! Detection and ground-truth lists as plain text, one `x y score` line per
//! entry. Scores print in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Scanner;
use crate::error::{Error, Result};
use crate::matcher::Detection;

/// Formats detections as `x y score` lines; inverse of
/// [`read_detections_bytes`] up to the component extent, which is not
/// serialized.
pub fn detections_string(detections: &[Detection]) -> String {
    let mut out = String::new();
    for d in detections {
        let _ = writeln!(out, "{} {} {}", d.x, d.y, d.score);
    }
    out
}

pub fn write_detections(detections: &[Detection], path: &Path) -> Result<()> {
    fs::write(path, detections_string(detections))?;
    Ok(())
}

/// Parses `x y score` lines into position/score triples.
pub fn read_detections_bytes(bytes: &[u8]) -> Result<Vec<(usize, usize, f64)>> {
    let mut sc = Scanner::new(bytes);
    let mut out = Vec::new();
    loop {
        let at = sc.next_token_offset();
        if at >= bytes.len() {
            break;
        }
        let x = sc.usize_token("detection x")?;
        let y = sc.usize_token("detection y")?;
        let score = sc.f64_token("detection score")?;
        if score.is_nan() {
            return Err(Error::parse(at, "detection score is NaN"));
        }
        out.push((x, y, score));
    }
    Ok(out)
}

pub fn read_detections(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    read_detections_bytes(&fs::read(path)?)
}
