//! File formats: portable graymaps for images, portable floatmaps for
//! distance maps, and line-oriented text for probes and detections.

pub mod detections;
pub mod pfm;
pub mod pgm;
pub mod probe;

use crate::error::{Error, Result};

/// Whitespace/comment-aware tokenizer over raw bytes, tracking offsets so
/// parse errors can point at the exact byte.
pub(crate) struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Scanner { bytes, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    /// Offset where the next token will start (separators skipped).
    pub(crate) fn next_token_offset(&mut self) -> usize {
        self.skip_separators();
        self.pos
    }

    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    /// Next whitespace-delimited token and the offset it starts at.
    pub(crate) fn token(&mut self, what: &str) -> Result<(usize, &'a [u8])> {
        self.skip_separators();
        if self.pos >= self.bytes.len() {
            return Err(Error::parse(
                self.bytes.len(),
                format!("unexpected end of input, expected {what}"),
            ));
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    pub(crate) fn usize_token(&mut self, what: &str) -> Result<usize> {
        let (offset, tok) = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(offset, format!("invalid {what}")))
    }

    pub(crate) fn i64_token(&mut self, what: &str) -> Result<i64> {
        let (offset, tok) = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(offset, format!("invalid {what}")))
    }

    pub(crate) fn f64_token(&mut self, what: &str) -> Result<f64> {
        let (offset, tok) = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(offset, format!("invalid {what}")))
    }

    /// Consumes exactly one whitespace byte (the separator before a binary
    /// payload) and returns the payload offset.
    pub(crate) fn binary_payload_start(&mut self) -> Result<usize> {
        if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_whitespace() {
            return Err(Error::parse(
                self.pos,
                "expected a single whitespace byte before binary payload",
            ));
        }
        self.pos += 1;
        Ok(self.pos)
    }

    /// Takes `n` raw bytes or reports where the payload ran out.
    pub(crate) fn take_bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::parse(
                self.bytes.len(),
                format!(
                    "payload truncated: need {n} bytes, found {}",
                    self.bytes.len() - self.pos
                ),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    /// After a full parse, only whitespace may remain.
    pub(crate) fn expect_trailing_whitespace(&mut self) -> Result<()> {
        while self.pos < self.bytes.len() {
            if !self.bytes[self.pos].is_ascii_whitespace() {
                return Err(Error::parse(self.pos, "trailing bytes after payload"));
            }
            self.pos += 1;
        }
        Ok(())
    }
}
