//! Textual probe files: diffable, hand-editable serialization of a
//! structuring function plus the anchor it was extracted at.
//!
//! ```text
//! # comments run to end of line
//! M 256
//! anchor 12 17
//! offset -1 -1 128
//! offset 0 0 230.5
//! ```
//!
//! Values print in shortest round-trip form, so write/read is lossless and
//! the offset order is preserved verbatim.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Scanner;
use crate::error::{Error, Result};
use crate::lip::GreyScale;
use crate::morpho::StructuringFunction;

/// A probe together with the pixel it was anchored at (provenance only; the
/// offsets are already anchor-relative).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFile {
    pub anchor: (i64, i64),
    pub probe: StructuringFunction,
}

/// Serializes a probe file; inverse of [`read_probe_bytes`].
pub fn probe_string(pf: &ProbeFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M {}", pf.probe.scale().m());
    let _ = writeln!(out, "anchor {} {}", pf.anchor.0, pf.anchor.1);
    for (&(dx, dy), &v) in pf.probe.offsets().iter().zip(pf.probe.values()) {
        let _ = writeln!(out, "offset {dx} {dy} {v}");
    }
    out
}

pub fn write_probe(pf: &ProbeFile, path: &Path) -> Result<()> {
    fs::write(path, probe_string(pf))?;
    Ok(())
}

/// Parses a probe file. Field order is fixed (`M`, `anchor`, then one or
/// more `offset` lines); offsets must be unique and values strictly inside
/// `]0, M[`.
pub fn read_probe_bytes(bytes: &[u8]) -> Result<ProbeFile> {
    let mut sc = Scanner::new(bytes);
    expect_keyword(&mut sc, "M")?;
    let m_at = sc.next_token_offset();
    let m = sc.f64_token("grey-scale bound")?;
    let scale = GreyScale::new(m).map_err(|e| Error::parse(m_at, e.to_string()))?;
    expect_keyword(&mut sc, "anchor")?;
    let anchor = (sc.i64_token("anchor x")?, sc.i64_token("anchor y")?);

    let mut offsets = Vec::new();
    let mut values = Vec::new();
    let mut seen = HashSet::new();
    loop {
        let at = sc.next_token_offset();
        let Ok((_, keyword)) = sc.token("offset entry") else {
            break;
        };
        if keyword != b"offset" {
            return Err(Error::parse(
                at,
                format!(
                    "expected keyword 'offset', found {:?}",
                    String::from_utf8_lossy(keyword)
                ),
            ));
        }
        let h = (sc.i64_token("offset dx")?, sc.i64_token("offset dy")?);
        let v_at = sc.next_token_offset();
        let v = sc.f64_token("probe value")?;
        if !seen.insert(h) {
            return Err(Error::parse(at, format!("duplicate offset {h:?}")));
        }
        if !(v > 0.0 && v < m) {
            return Err(Error::parse(
                v_at,
                format!("probe value {v} outside ]0, {m}["),
            ));
        }
        offsets.push(h);
        values.push(v);
    }
    if offsets.is_empty() {
        return Err(Error::parse(sc.pos(), "probe has no offset entries"));
    }
    Ok(ProbeFile {
        anchor,
        probe: StructuringFunction::new(offsets, values, scale)?,
    })
}

pub fn read_probe(path: &Path) -> Result<ProbeFile> {
    read_probe_bytes(&fs::read(path)?)
}

fn expect_keyword(sc: &mut Scanner, keyword: &str) -> Result<()> {
    let (at, tok) = sc.token(keyword)?;
    if tok != keyword.as_bytes() {
        return Err(Error::parse(
            at,
            format!(
                "expected keyword '{keyword}', found {:?}",
                String::from_utf8_lossy(tok)
            ),
        ));
    }
    Ok(())
}
