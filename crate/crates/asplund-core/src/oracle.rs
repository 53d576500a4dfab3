//! Definition-level reference for the window bounds.
//!
//! The closed forms in [`crate::asplund`] go through the tilde transform; to
//! check them independently this oracle works on the defining inequalities
//! themselves, evaluating probe homotheties with raw LIP scalar
//! multiplication and bisecting on the homothety factor. Slow and meant for
//! tests only.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::lip::scalar_mul_value;
use crate::morpho::StructuringFunction;

const BRACKET_START: f64 = 9.5367431640625e-7; // 2^-20
const BRACKET_LIMIT: f64 = 1.152921504606847e18; // 2^60

/// The least upper bound `inf { α : f(x+h) ≤ α ⊗ B(h) ∀h }` and greatest
/// lower bound `sup { β : β ⊗ B(h) ≤ f(x+h) ∀h }` at pixel `(x, y)`, each
/// located by bisection to within `tol`.
///
/// Fails with an oracle error when a bracket cannot be established below
/// `2^60`, which happens exactly when some window sample sits at `M` (no
/// finite homothety of an interior-valued probe reaches absolute black).
pub fn oracle_bounds(
    f: &Image,
    b: &StructuringFunction,
    x: usize,
    y: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Parameter(format!(
            "bisection tolerance {tol} must be positive and finite"
        )));
    }
    if f.scale() != b.scale() {
        return Err(Error::Shape(format!(
            "image scale M={} differs from probe scale M={}",
            f.scale().m(),
            b.scale().m()
        )));
    }
    let m = f.scale().m();
    let mut window = Vec::with_capacity(b.len());
    for (&(dx, dy), &bv) in b.offsets().iter().zip(b.values()) {
        let sx = x as i64 + dx;
        let sy = y as i64 + dy;
        if sx < 0 || sy < 0 || sx >= f.width() as i64 || sy >= f.height() as i64 {
            return Err(Error::Parameter(format!(
                "window at ({x}, {y}) leaves the {}x{} image",
                f.width(),
                f.height()
            )));
        }
        window.push((f.get(sx as usize, sy as usize), bv));
    }

    let dominates = |alpha: f64| {
        window
            .iter()
            .all(|&(fv, bv)| fv <= scalar_mul_value(alpha, bv, m))
    };
    let dominated = |beta: f64| {
        window
            .iter()
            .all(|&(fv, bv)| scalar_mul_value(beta, bv, m) <= fv)
    };

    // dominates is monotone increasing in alpha, dominated decreasing in
    // beta, so each has a single crossing to bracket.
    let lambda = if dominates(0.0) {
        0.0
    } else {
        let mut hi = BRACKET_START;
        while !dominates(hi) {
            hi *= 2.0;
            if hi > BRACKET_LIMIT {
                return Err(Error::Oracle(format!(
                    "no homothety below 2^60 dominates the window at ({x}, {y})"
                )));
            }
        }
        bisect(0.0, hi, tol, |mid| !dominates(mid))
    };

    let mut hi = BRACKET_START;
    while dominated(hi) {
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::Oracle(format!(
                "homotheties beyond 2^60 stay dominated at ({x}, {y})"
            )));
        }
    }
    let mu = bisect(0.0, hi, tol, dominated);

    Ok((lambda, mu))
}

/// Bisects `[lo, hi]` for the crossing of a predicate that is true at `lo`
/// and false at `hi`, returning the midpoint of the final bracket.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, true_below: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if true_below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / 2.0
}
