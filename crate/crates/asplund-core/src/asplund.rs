//! Asplund distances between an image and a probe, as sliding-window maps.
//!
//! For a window of samples `f(x+h)` and a probe `B`, the least upper bound is
//! `λ(x) = sup_h tilde(f)(x+h) / tilde(B)(h)` and the greatest lower bound is
//! the infimum of the same ratios; the distance is `ln(λ/μ)`. Everything here
//! reduces to those per-sample ratios, so the ratio and log-ratio helpers
//! below are the single source of truth for extended-real corner cases, and
//! the exact, tolerance, flat, and rank-filter paths agree bit for bit
//! wherever they overlap.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::Image;
use crate::lip::tilde_value;
use crate::morpho::{erode_flat, rank_filter, FlatDomain, StructuringFunction};

/// Which bound a [`BoundMap`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Least upper bound `λ_B f`: smallest probe homothety dominating the
    /// window.
    Upper,
    /// Greatest lower bound `μ_B f`: largest probe homothety dominated by
    /// the window.
    Lower,
}

/// Per-pixel field of one-sided bounds, nonnegative wherever valid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundMap {
    field: Field,
    kind: BoundKind,
}

impl BoundMap {
    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.field.width()
    }

    pub fn height(&self) -> usize {
        self.field.height()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.field.get(x, y)
    }

    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.field.is_valid(x, y)
    }
}

/// Per-pixel field of Asplund distances, nonnegative wherever valid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    field: Field,
    tolerance: f64,
}

impl DistanceMap {
    /// Wraps a field of distances. The tolerance records the discard
    /// fraction the map was computed with (0 for exact maps and for maps
    /// read back from files).
    pub fn new(field: Field, tolerance: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&tolerance) {
            return Err(Error::Parameter(format!(
                "tolerance {tolerance} outside [0, 0.5)"
            )));
        }
        if field
            .values()
            .iter()
            .zip(field.valid_mask())
            .any(|(&v, &ok)| ok && v < 0.0)
        {
            return Err(Error::Domain(
                "distance map holds a negative value at a valid pixel".into(),
            ));
        }
        Ok(DistanceMap { field, tolerance })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn into_field(self) -> Field {
        self.field
    }

    pub fn width(&self) -> usize {
        self.field.width()
    }

    pub fn height(&self) -> usize {
        self.field.height()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.field.get(x, y)
    }

    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.field.is_valid(x, y)
    }
}

/// How distance computations treat grey tones at 0, where the ratio field
/// degenerates (a white pixel matches every probe homothety from below).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityPolicy {
    /// Raise every sampled value below `floor` up to `floor` before forming
    /// ratios. The default floor of one grey level keeps real 8-bit images
    /// usable without further ceremony.
    Clamp { floor: f64 },
    /// Leave values untouched and mark every output pixel whose window
    /// touches a nonpositive grey tone invalid.
    Strict,
}

impl Default for PositivityPolicy {
    fn default() -> Self {
        PositivityPolicy::Clamp { floor: 1.0 }
    }
}

/// The per-sample ratio `tilde(f) / tilde(b)` as a nonnegative extended
/// real. Both arguments live in `[-∞, 0]`. Conventions, in order:
/// `tf = 0` (white sample) gives 0 whatever the probe; a white probe value
/// (`tb = 0`, unreachable for checked probes) gives +∞; a black probe value
/// gives 1 against a black sample and 0 otherwise; everything else is the
/// plain quotient, +∞ when the sample is black. Never NaN, never -0.0.
#[inline]
pub(crate) fn tilde_ratio(tf: f64, tb: f64) -> f64 {
    if tf == 0.0 {
        return 0.0;
    }
    if tb == 0.0 {
        return f64::INFINITY;
    }
    if tb == f64::NEG_INFINITY {
        return if tf == f64::NEG_INFINITY { 1.0 } else { 0.0 };
    }
    tf / tb
}

/// `ln(lam / mu)` for `lam ≥ mu ≥ 0`, extended-real. Equal bounds give an
/// exact 0 (this covers 0/0 at all-white windows and ∞/∞); a zero lower
/// bound or infinite upper bound gives +∞. Never NaN, never negative.
#[inline]
pub(crate) fn ln_ratio(lam: f64, mu: f64) -> f64 {
    debug_assert!(lam >= mu, "bounds out of order: {lam} < {mu}");
    if lam == mu {
        return 0.0;
    }
    if mu == 0.0 || lam == f64::INFINITY {
        return f64::INFINITY;
    }
    (lam / mu).ln()
}

/// Inclusive pixel rectangle where every window sample lands inside the
/// image, plus per-offset linear displacements for direct indexing.
struct WindowGeom {
    x0: usize,
    x1: usize,
    y0: usize,
    y1: usize,
    deltas: Vec<isize>,
}

fn window_geometry(offsets: &[(i64, i64)], width: usize, height: usize) -> Option<WindowGeom> {
    let dx_min = offsets.iter().map(|o| o.0).min()?;
    let dx_max = offsets.iter().map(|o| o.0).max()?;
    let dy_min = offsets.iter().map(|o| o.1).min()?;
    let dy_max = offsets.iter().map(|o| o.1).max()?;
    let x0 = (-dx_min).max(0);
    let x1 = (width as i64 - 1 - dx_max).min(width as i64 - 1);
    let y0 = (-dy_min).max(0);
    let y1 = (height as i64 - 1 - dy_max).min(height as i64 - 1);
    if x0 > x1 || y0 > y1 {
        return None;
    }
    let deltas = offsets
        .iter()
        .map(|&(dx, dy)| (dy * width as i64 + dx) as isize)
        .collect();
    Some(WindowGeom {
        x0: x0 as usize,
        x1: x1 as usize,
        y0: y0 as usize,
        y1: y1 as usize,
        deltas,
    })
}

fn check_scale(f: &Image, b: &StructuringFunction) -> Result<()> {
    if f.scale() != b.scale() {
        return Err(Error::Shape(format!(
            "image scale M={} differs from probe scale M={}",
            f.scale().m(),
            b.scale().m()
        )));
    }
    Ok(())
}

fn check_flat_level(b0: f64, m: f64) -> Result<f64> {
    if !(b0 > 0.0 && b0 < m) {
        return Err(Error::Domain(format!(
            "flat probe level {b0} must lie strictly inside ]0, {m}["
        )));
    }
    Ok(tilde_value(b0, m))
}

/// Applies the positivity policy: returns the (possibly clamped) sample grid
/// and, in strict mode, the per-pixel taint flags that poison any window
/// containing them.
fn apply_policy(f: &Image, policy: PositivityPolicy) -> Result<(Vec<f64>, Option<Vec<bool>>)> {
    match policy {
        PositivityPolicy::Clamp { floor } => {
            let m = f.scale().m();
            if !floor.is_finite() || floor < 0.0 || floor >= m {
                return Err(Error::Parameter(format!(
                    "clamp floor {floor} must lie in [0, {m}["
                )));
            }
            Ok((f.values().iter().map(|&v| v.max(floor)).collect(), None))
        }
        PositivityPolicy::Strict => {
            let tainted = f.values().iter().map(|&v| v <= 0.0).collect();
            Ok((f.values().to_vec(), Some(tainted)))
        }
    }
}

/// Discard count per side for tolerance `p` over a window of `n` points.
fn discard_count(p: f64, n: usize) -> Result<usize> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Parameter(format!("tolerance {p} outside [0, 0.5)")));
    }
    let k = (p * n as f64).floor() as usize;
    if 2 * k >= n {
        return Err(Error::Parameter(format!(
            "discarding {k} points per side empties a window of {n}"
        )));
    }
    Ok(k)
}

/// Scalar Asplund distance between two images over their whole domain:
/// `ln(max ratio / min ratio)` with ratios `tilde(f)/tilde(g)` per pixel.
/// A metric on equivalence classes under LIP scalar multiplication, so it
/// vanishes exactly when `f = k ⊗ g`. Callers are responsible for keeping
/// `g` (and, for finite results, `f`) strictly inside `]0, M[`.
pub fn asplund_distance(f: &Image, g: &Image) -> Result<f64> {
    if f.width() != g.width() || f.height() != g.height() || f.scale() != g.scale() {
        return Err(Error::Shape(format!(
            "images are {}x{} (M={}) and {}x{} (M={})",
            f.width(),
            f.height(),
            f.scale().m(),
            g.width(),
            g.height(),
            g.scale().m()
        )));
    }
    let m = f.scale().m();
    let mut lam = f64::NEG_INFINITY;
    let mut mu = f64::INFINITY;
    for (&fv, &gv) in f.values().iter().zip(g.values()) {
        let r = tilde_ratio(tilde_value(fv, m), tilde_value(gv, m));
        lam = lam.max(r);
        mu = mu.min(r);
    }
    Ok(ln_ratio(lam, mu))
}

fn bound_map(f: &Image, b: &StructuringFunction, kind: BoundKind) -> Result<BoundMap> {
    check_scale(f, b)?;
    let (width, height) = (f.width(), f.height());
    let m = f.scale().m();
    let tf: Vec<f64> = f.values().iter().map(|&v| tilde_value(v, m)).collect();
    let tb: Vec<f64> = b.values().iter().map(|&v| tilde_value(v, m)).collect();
    let mut out = vec![f64::INFINITY; width * height];
    let mut valid = vec![false; width * height];
    if let Some(geom) = window_geometry(b.offsets(), width, height) {
        let take_max = kind == BoundKind::Upper;
        out.par_chunks_mut(width)
            .zip(valid.par_chunks_mut(width))
            .enumerate()
            .for_each(|(y, (orow, vrow))| {
                if y < geom.y0 || y > geom.y1 {
                    return;
                }
                for x in geom.x0..=geom.x1 {
                    let base = (y * width + x) as isize;
                    let mut acc = if take_max {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    };
                    for (i, &d) in geom.deltas.iter().enumerate() {
                        let r = tilde_ratio(tf[(base + d) as usize], tb[i]);
                        acc = if take_max { acc.max(r) } else { acc.min(r) };
                    }
                    orow[x] = acc;
                    vrow[x] = true;
                }
            });
    }
    Ok(BoundMap {
        field: Field::new(width, height, out, valid)?,
        kind,
    })
}

/// Map of least upper bounds `λ_B f`. A dilation in the lattice sense: it
/// commutes with pointwise suprema of images. 0 only where the window is
/// all white; +∞ where it touches a black (`M`) sample.
pub fn lambda_map(f: &Image, b: &StructuringFunction) -> Result<BoundMap> {
    bound_map(f, b, BoundKind::Upper)
}

/// Map of greatest lower bounds `μ_B f`. An erosion: commutes with pointwise
/// infima. +∞ exactly where the whole window is black.
pub fn mu_map(f: &Image, b: &StructuringFunction) -> Result<BoundMap> {
    bound_map(f, b, BoundKind::Lower)
}

/// Exact distance map for an arbitrary structuring function: per valid
/// pixel, `ln` of the ratio of the extreme per-sample ratios.
pub fn distance_map_general(
    f: &Image,
    b: &StructuringFunction,
    policy: PositivityPolicy,
) -> Result<DistanceMap> {
    check_scale(f, b)?;
    let (width, height) = (f.width(), f.height());
    let m = f.scale().m();
    let (vals, tainted) = apply_policy(f, policy)?;
    let tf: Vec<f64> = vals.iter().map(|&v| tilde_value(v, m)).collect();
    let tb: Vec<f64> = b.values().iter().map(|&v| tilde_value(v, m)).collect();
    let mut out = vec![f64::INFINITY; width * height];
    let mut valid = vec![false; width * height];
    if let Some(geom) = window_geometry(b.offsets(), width, height) {
        let tainted = tainted.as_deref();
        out.par_chunks_mut(width)
            .zip(valid.par_chunks_mut(width))
            .enumerate()
            .for_each(|(y, (orow, vrow))| {
                if y < geom.y0 || y > geom.y1 {
                    return;
                }
                for x in geom.x0..=geom.x1 {
                    let base = (y * width + x) as isize;
                    let mut lam = f64::NEG_INFINITY;
                    let mut mu = f64::INFINITY;
                    let mut ok = true;
                    for (i, &d) in geom.deltas.iter().enumerate() {
                        let si = (base + d) as usize;
                        if tainted.is_some_and(|t| t[si]) {
                            ok = false;
                            break;
                        }
                        let r = tilde_ratio(tf[si], tb[i]);
                        lam = lam.max(r);
                        mu = mu.min(r);
                    }
                    if ok {
                        orow[x] = ln_ratio(lam, mu);
                        vrow[x] = true;
                    }
                }
            });
    }
    DistanceMap::new(Field::new(width, height, out, valid)?, 0.0)
}

/// Exact distance map for a flat probe at level `b0`. Only the window
/// extrema of `f` matter, so this runs one combined min/max sweep and takes
/// logs once; `b0` cancels between numerator and denominator and must not
/// change the result. Agrees bitwise with [`distance_map_general`] on the
/// constant-`b0` probe over the same domain.
pub fn distance_map_flat(
    f: &Image,
    b0: f64,
    d: &FlatDomain,
    policy: PositivityPolicy,
) -> Result<DistanceMap> {
    let (width, height) = (f.width(), f.height());
    let m = f.scale().m();
    let tb0 = check_flat_level(b0, m)?;
    let (vals, tainted) = apply_policy(f, policy)?;
    let mut out = vec![f64::INFINITY; width * height];
    let mut valid = vec![false; width * height];
    if let Some(geom) = window_geometry(d.offsets(), width, height) {
        let tainted = tainted.as_deref();
        let vals = &vals;
        out.par_chunks_mut(width)
            .zip(valid.par_chunks_mut(width))
            .enumerate()
            .for_each(|(y, (orow, vrow))| {
                if y < geom.y0 || y > geom.y1 {
                    return;
                }
                for x in geom.x0..=geom.x1 {
                    let base = (y * width + x) as isize;
                    let mut vmax = f64::NEG_INFINITY;
                    let mut vmin = f64::INFINITY;
                    let mut ok = true;
                    for &d in &geom.deltas {
                        let si = (base + d) as usize;
                        if tainted.is_some_and(|t| t[si]) {
                            ok = false;
                            break;
                        }
                        let v = vals[si];
                        vmax = vmax.max(v);
                        vmin = vmin.min(v);
                    }
                    if ok {
                        let lam = tilde_ratio(tilde_value(vmax, m), tb0);
                        let mu = tilde_ratio(tilde_value(vmin, m), tb0);
                        orow[x] = ln_ratio(lam, mu);
                        vrow[x] = true;
                    }
                }
            });
    }
    DistanceMap::new(Field::new(width, height, out, valid)?, 0.0)
}

/// Tolerance distance map: per window, the `n` ratios are sorted ascending
/// and `k = floor(p·n)` points are discarded at each extreme, so the bounds
/// become the `(n-k)`-th and `(k+1)`-th order statistics. `p = 0` reproduces
/// [`distance_map_general`] bit for bit; larger `p` can only shrink values.
pub fn distance_map_tolerance(
    f: &Image,
    b: &StructuringFunction,
    p: f64,
    policy: PositivityPolicy,
) -> Result<DistanceMap> {
    check_scale(f, b)?;
    let n = b.len();
    let k = discard_count(p, n)?;
    let (width, height) = (f.width(), f.height());
    let m = f.scale().m();
    let (vals, tainted) = apply_policy(f, policy)?;
    let tf: Vec<f64> = vals.iter().map(|&v| tilde_value(v, m)).collect();
    let tb: Vec<f64> = b.values().iter().map(|&v| tilde_value(v, m)).collect();
    let mut out = vec![f64::INFINITY; width * height];
    let mut valid = vec![false; width * height];
    if let Some(geom) = window_geometry(b.offsets(), width, height) {
        let tainted = tainted.as_deref();
        out.par_chunks_mut(width)
            .zip(valid.par_chunks_mut(width))
            .enumerate()
            .for_each(|(y, (orow, vrow))| {
                if y < geom.y0 || y > geom.y1 {
                    return;
                }
                let mut ratios = Vec::with_capacity(n);
                for x in geom.x0..=geom.x1 {
                    let base = (y * width + x) as isize;
                    ratios.clear();
                    let mut ok = true;
                    for (i, &d) in geom.deltas.iter().enumerate() {
                        let si = (base + d) as usize;
                        if tainted.is_some_and(|t| t[si]) {
                            ok = false;
                            break;
                        }
                        ratios.push(tilde_ratio(tf[si], tb[i]));
                    }
                    if ok {
                        ratios.sort_unstable_by(f64::total_cmp);
                        orow[x] = ln_ratio(ratios[n - 1 - k], ratios[k]);
                        vrow[x] = true;
                    }
                }
            });
    }
    DistanceMap::new(Field::new(width, height, out, valid)?, p)
}

/// Tolerance map for a flat probe via rank filters: because the per-sample
/// ratio is monotone in the grey tone when the probe is constant, the
/// `(n-k)`-th and `(k+1)`-th ratio order statistics are the ratios of the
/// same order statistics of `f` itself, each available from [`rank_filter`].
/// Agrees bitwise with [`distance_map_tolerance`] on the constant-`b0`
/// probe, and with [`distance_map_flat`] at `p = 0`.
pub fn distance_map_flat_tolerance(
    f: &Image,
    b0: f64,
    d: &FlatDomain,
    p: f64,
    policy: PositivityPolicy,
) -> Result<DistanceMap> {
    let m = f.scale().m();
    let tb0 = check_flat_level(b0, m)?;
    let n = d.len();
    let k = discard_count(p, n)?;
    let (vals, tainted) = apply_policy(f, policy)?;
    let clamped = Image::from_vec(f.width(), f.height(), vals, f.scale())?;
    let hi = rank_filter(&clamped, d, n - k)?;
    let lo = rank_filter(&clamped, d, k + 1)?;
    // In strict mode a window is poisoned exactly when its raw minimum is
    // nonpositive, which one erosion over the untouched image reports.
    let raw_min = tainted.map(|_| erode_flat(f, d));
    let mut out = vec![f64::INFINITY; hi.values().len()];
    let mut valid = vec![false; out.len()];
    for i in 0..out.len() {
        if !hi.valid_mask()[i] {
            continue;
        }
        if let Some(rm) = &raw_min {
            if rm.values()[i] <= 0.0 {
                continue;
            }
        }
        let lam = tilde_ratio(tilde_value(hi.values()[i], m), tb0);
        let mu = tilde_ratio(tilde_value(lo.values()[i], m), tb0);
        out[i] = ln_ratio(lam, mu);
        valid[i] = true;
    }
    DistanceMap::new(Field::new(f.width(), f.height(), out, valid)?, p)
}
