//! Extended-real grids with validity masks.
//!
//! Sliding-window operators only produce output where the whole window fits
//! inside the image, so every derived grid carries a boolean mask alongside
//! its values. Values at invalid pixels are unspecified; consumers must
//! consult the mask (file writers emit +∞ there).

use crate::error::{Error, Result};

/// A row-major grid of extended reals (`±∞` allowed, NaN rejected) plus a
/// per-pixel validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    width: usize,
    height: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl Field {
    /// Wraps row-major value and mask buffers of matching size.
    pub fn new(width: usize, height: usize, values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape(format!(
                "field dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height || valid.len() != width * height {
            return Err(Error::Shape(format!(
                "buffers hold {} values / {} flags, expected {}",
                values.len(),
                valid.len(),
                width * height
            )));
        }
        if values.iter().zip(&valid).any(|(v, &ok)| ok && v.is_nan()) {
            return Err(Error::Domain("field holds NaN at a valid pixel".into()));
        }
        Ok(Field {
            width,
            height,
            values,
            valid,
        })
    }

    /// A field with every pixel marked valid.
    pub fn all_valid(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let valid = vec![true; values.len()];
        Field::new(width, height, values, valid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.valid[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    /// Number of valid pixels.
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&ok| ok).count()
    }

    /// Minimum and maximum over finite values at valid pixels, if any exist.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for (v, &ok) in self.values.iter().zip(&self.valid) {
            if ok && v.is_finite() {
                range = Some(match range {
                    None => (*v, *v),
                    Some((lo, hi)) => (lo.min(*v), hi.max(*v)),
                });
            }
        }
        range
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_checks_buffer_sizes() {
        assert!(matches!(
            Field::new(2, 2, vec![0.0; 4], vec![true; 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            Field::new(2, 2, vec![0.0; 3], vec![true; 4]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn nan_is_rejected_only_where_valid() {
        assert!(Field::new(1, 2, vec![f64::NAN, 1.0], vec![false, true]).is_ok());
        assert!(matches!(
            Field::new(1, 2, vec![f64::NAN, 1.0], vec![true, true]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn finite_range_skips_invalid_and_infinite() {
        let f = Field::new(
            2,
            2,
            vec![f64::INFINITY, 3.0, -1.0, 99.0],
            vec![true, true, true, false],
        )
        .unwrap();
        assert_eq!(f.finite_range(), Some((-1.0, 3.0)));
        assert_eq!(f.valid_count(), 3);
    }
}
