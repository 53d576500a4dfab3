//! Logarithmic image processing (LIP) arithmetic.
//!
//! Grey tones live in `[0, M[` with 0 at the white end of the scale: a grey
//! tone measures the opacity of the obstacle between source and sensor, so
//! adding two images superposes their obstacles and multiplying by a scalar
//! rescales the obstacle thickness. The `tilde` transform `v ↦ ln(1 − v/M)`
//! carries this cone onto `[-∞, 0]`, where LIP scalar multiplication becomes
//! ordinary multiplication; every closed form downstream rides on it.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::Image;

/// The bounded grey-tone range `[0, M[`.
///
/// `M` is the absolute black of the scale; 8-bit images conventionally use
/// `M = 256` so stored levels `0..=255` stay strictly below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreyScale {
    m: f64,
}

impl GreyScale {
    /// Creates a scale with upper bound `m`; `m` must be finite and positive.
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Domain(format!(
                "grey-scale bound must be finite and positive, got {m}"
            )));
        }
        Ok(GreyScale { m })
    }

    /// Upper bound of the grey-tone range.
    pub fn m(&self) -> f64 {
        self.m
    }
}

impl Default for GreyScale {
    fn default() -> Self {
        GreyScale { m: 256.0 }
    }
}

/// LIP addition of two grey tones: `a + b - a*b/m`.
#[inline]
pub fn add_values(a: f64, b: f64, m: f64) -> f64 {
    // Rounding can push the sum past m for inputs within one ulp of m.
    (a + b - a * b / m).min(m)
}

/// LIP scalar multiplication of a grey tone: `m - m*(1 - v/m)^k`.
///
/// `k = 0` yields 0 for every input, including `v = m` (`powf(0, 0) = 1`).
#[inline]
pub fn scalar_mul_value(k: f64, v: f64, m: f64) -> f64 {
    m - m * (1.0 - v / m).powf(k)
}

/// The tilde transform `ln(1 - v/m)`, a strictly decreasing bijection from
/// `[0, m]` onto `[-∞, 0]`.
#[inline]
pub fn tilde_value(v: f64, m: f64) -> f64 {
    (1.0 - v / m).ln()
}

/// Inverse of [`tilde_value`]: `m * (1 - exp(u))` for `u ≤ 0`.
#[inline]
pub fn tilde_inverse_value(u: f64, m: f64) -> f64 {
    m * (1.0 - u.exp())
}

fn check_same_shape(f: &Image, g: &Image) -> Result<()> {
    if f.width() != g.width() || f.height() != g.height() {
        return Err(Error::Shape(format!(
            "images are {}x{} and {}x{}",
            f.width(),
            f.height(),
            g.width(),
            g.height()
        )));
    }
    if f.scale() != g.scale() {
        return Err(Error::Shape(format!(
            "grey scales differ: M={} vs M={}",
            f.scale().m(),
            g.scale().m()
        )));
    }
    Ok(())
}

/// Pointwise LIP addition of two images of identical shape and scale.
///
/// Inputs must stay strictly below `M`; the superposition law keeps the
/// result inside `[0, M[`.
pub fn add(f: &Image, g: &Image) -> Result<Image> {
    check_same_shape(f, g)?;
    let m = f.scale().m();
    for (img, name) in [(f, "left"), (g, "right")] {
        if img.values().iter().any(|&v| v >= m) {
            return Err(Error::Domain(format!(
                "{name} operand of LIP addition has a value at or above M={m}"
            )));
        }
    }
    let values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(&a, &b)| add_values(a, b, m))
        .collect();
    Image::from_vec(f.width(), f.height(), values, f.scale())
}

/// Pointwise LIP scalar multiplication `k ⊗ f` for `k ≥ 0`.
///
/// Values may equal `M`; they map to `M` again for every `k > 0`. Negative
/// scalars would leave the positive cone and are rejected.
pub fn scalar_mul(k: f64, f: &Image) -> Result<Image> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Domain(format!(
            "LIP scalar must be finite and nonnegative, got {k}"
        )));
    }
    let m = f.scale().m();
    let values = f
        .values()
        .iter()
        .map(|&v| scalar_mul_value(k, v, m))
        .collect();
    Image::from_vec(f.width(), f.height(), values, f.scale())
}

/// The tilde transform of a whole image; the result is a fully valid field
/// of nonpositive extended reals (`0` at grey tone 0, `-∞` at grey tone `M`).
pub fn tilde(f: &Image) -> Result<Field> {
    let m = f.scale().m();
    if let Some(&bad) = f.values().iter().find(|&&v| !(0.0..=m).contains(&v)) {
        return Err(Error::Domain(format!(
            "tilde input {bad} lies outside [0, {m}]"
        )));
    }
    let values = f.values().iter().map(|&v| tilde_value(v, m)).collect();
    Field::all_valid(f.width(), f.height(), values)
}

/// Maps a field of nonpositive extended reals back to grey tones.
pub fn tilde_inverse(u: &Field, scale: GreyScale) -> Result<Image> {
    if !u.valid_mask().iter().all(|&ok| ok) {
        return Err(Error::Domain(
            "tilde inverse requires a fully valid field".into(),
        ));
    }
    if let Some(&bad) = u.values().iter().find(|&&v| v > 0.0 || v.is_nan()) {
        return Err(Error::Domain(format!(
            "tilde inverse input {bad} is not a nonpositive extended real"
        )));
    }
    let m = scale.m();
    let values = u
        .values()
        .iter()
        .map(|&v| tilde_inverse_value(v, m))
        .collect();
    Image::from_vec(u.width(), u.height(), values, scale)
}

/// Flips between the classic file convention (0 = black) and the LIP
/// convention (0 = white): `v ↦ (M − 1) − v`. Involutive on `[0, M−1]`.
pub fn invert_convention(f: &Image) -> Result<Image> {
    let m = f.scale().m();
    let top = m - 1.0;
    if let Some(&bad) = f.values().iter().find(|&&v| v > top) {
        return Err(Error::Domain(format!(
            "convention inversion expects values in [0, {top}], got {bad}"
        )));
    }
    let values = f.values().iter().map(|&v| top - v).collect();
    Image::from_vec(f.width(), f.height(), values, f.scale())
}
