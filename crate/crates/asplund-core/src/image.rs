//! Grey-tone images: rectangular `f64` grids tied to a [`GreyScale`].

use crate::error::{Error, Result};
use crate::lip::GreyScale;

/// A row-major grid of grey tones in `[0, M]`.
///
/// The upper bound `M` itself is admitted so that limits of LIP operations
/// (absolute black) remain representable; operations that require `v < M`
/// check for it at their own boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    values: Vec<f64>,
    scale: GreyScale,
}

impl Image {
    /// Wraps a row-major buffer. Fails if the buffer length does not equal
    /// `width * height`, if either dimension is zero, or if any value falls
    /// outside `[0, M]`.
    pub fn from_vec(
        width: usize,
        height: usize,
        values: Vec<f64>,
        scale: GreyScale,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::Shape(format!(
                "buffer holds {} values, expected {}x{} = {}",
                values.len(),
                width,
                height,
                width * height
            )));
        }
        let m = scale.m();
        if let Some(&bad) = values.iter().find(|&&v| !(0.0..=m).contains(&v)) {
            return Err(Error::Domain(format!(
                "grey tone {bad} lies outside [0, {m}]"
            )));
        }
        Ok(Image {
            width,
            height,
            values,
            scale,
        })
    }

    /// An image with every pixel set to `value`.
    pub fn constant(width: usize, height: usize, value: f64, scale: GreyScale) -> Result<Self> {
        Image::from_vec(width, height, vec![value; width * height], scale)
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        scale: GreyScale,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Image::from_vec(width, height, values, scale)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn scale(&self) -> GreyScale {
        self.scale
    }

    /// Grey tone at column `x`, row `y`. Panics if out of bounds, like slice
    /// indexing.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.values[y * self.width + x]
    }

    /// Row-major view of all pixels.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes the image, returning its raw buffer.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
