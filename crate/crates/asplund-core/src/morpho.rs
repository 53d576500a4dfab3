//! Translation-invariant grey-level morphology.
//!
//! Dilation samples `f(x - h)`, erosion samples `f(x + h)`; that asymmetry is
//! load-bearing, so callers wanting a window maximum over `x + h` pass the
//! reflected domain to [`dilate_flat`]. All operators use "valid" border
//! semantics: a pixel produces output only when every sample it needs lies
//! inside the image, and the validity mask travels with the result.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::Image;
use crate::lip::GreyScale;

/// Domain of a flat structuring element: a finite, duplicate-free set of
/// integer displacements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatDomain {
    offsets: Vec<(i64, i64)>,
}

impl FlatDomain {
    /// Wraps an offset list, rejecting empty input and duplicates. The given
    /// order is preserved (it never affects results, only file layouts).
    pub fn new(offsets: Vec<(i64, i64)>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Parameter("domain must be nonempty".into()));
        }
        let mut seen = HashSet::with_capacity(offsets.len());
        for &h in &offsets {
            if !seen.insert(h) {
                return Err(Error::Parameter(format!("duplicate offset {h:?}")));
            }
        }
        Ok(FlatDomain { offsets })
    }

    /// Axis-aligned rectangle of offsets starting at `(x0, y0)`, row-major.
    pub fn rect(x0: i64, y0: i64, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "rectangle must be nonempty, got {width}x{height}"
            )));
        }
        let mut offsets = Vec::with_capacity(width * height);
        for dy in 0..height as i64 {
            for dx in 0..width as i64 {
                offsets.push((x0 + dx, y0 + dy));
            }
        }
        Ok(FlatDomain { offsets })
    }

    /// The reflected (transposed) domain `{ -h : h ∈ self }`.
    pub fn reflect(&self) -> FlatDomain {
        FlatDomain {
            offsets: self.offsets.iter().map(|&(dx, dy)| (-dx, -dy)).collect(),
        }
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// A probe: offsets paired with strictly interior grey tones `0 < B(h) < M`,
/// so that `tilde(B(h))` is finite and strictly negative.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuringFunction {
    offsets: Vec<(i64, i64)>,
    values: Vec<f64>,
    scale: GreyScale,
}

impl StructuringFunction {
    /// Pairs offsets with values; both lists must have equal length, offsets
    /// must be unique, and every value must lie strictly inside `]0, M[`.
    pub fn new(offsets: Vec<(i64, i64)>, values: Vec<f64>, scale: GreyScale) -> Result<Self> {
        if offsets.len() != values.len() {
            return Err(Error::Parameter(format!(
                "{} offsets but {} values",
                offsets.len(),
                values.len()
            )));
        }
        let domain = FlatDomain::new(offsets)?;
        let m = scale.m();
        if let Some(&bad) = values.iter().find(|&&v| !(v > 0.0 && v < m)) {
            return Err(Error::Domain(format!(
                "probe value {bad} must lie strictly inside ]0, {m}["
            )));
        }
        Ok(StructuringFunction {
            offsets: domain.offsets,
            values,
            scale,
        })
    }

    /// A constant (flat) probe with value `b0` on the given domain.
    pub fn flat(d: &FlatDomain, b0: f64, scale: GreyScale) -> Result<Self> {
        StructuringFunction::new(d.offsets.clone(), vec![b0; d.len()], scale)
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> GreyScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// The probe's offset set as a flat domain.
    pub fn domain(&self) -> FlatDomain {
        FlatDomain {
            offsets: self.offsets.clone(),
        }
    }

    /// True when all values are equal, i.e. the probe is a flat structuring
    /// element up to its level.
    pub fn is_flat(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

/// Shared sliding-extreme kernel over a raw grid. `terms[i]` is added to the
/// sample of `offsets[i]` (zero for flat operators); `sample_minus` selects
/// `x - h` (dilation side) versus `x + h` (erosion side).
fn extreme_field(
    width: usize,
    height: usize,
    values: &[f64],
    offsets: &[(i64, i64)],
    terms: Option<&[f64]>,
    sample_minus: bool,
    take_max: bool,
) -> (Vec<f64>, Vec<bool>) {
    let n = width * height;
    let mut out = vec![f64::INFINITY; n];
    let mut valid = vec![false; n];
    let identity = if take_max {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            let mut acc = identity;
            let mut ok = true;
            for (i, &(dx, dy)) in offsets.iter().enumerate() {
                let (sx, sy) = if sample_minus {
                    (x - dx, y - dy)
                } else {
                    (x + dx, y + dy)
                };
                if sx < 0 || sx >= width as i64 || sy < 0 || sy >= height as i64 {
                    ok = false;
                    break;
                }
                let mut v = values[(sy * width as i64 + sx) as usize];
                if let Some(t) = terms {
                    v += t[i];
                }
                acc = if take_max { acc.max(v) } else { acc.min(v) };
            }
            if ok {
                let idx = (y * width as i64 + x) as usize;
                out[idx] = acc;
                valid[idx] = true;
            }
        }
    }
    (out, valid)
}

fn build_field(f: &Image, parts: (Vec<f64>, Vec<bool>)) -> Field {
    Field::new(f.width(), f.height(), parts.0, parts.1)
        .expect("sliding-window kernel emits well-shaped, NaN-free buffers")
}

/// Flat dilation: at each valid `x`, the supremum of `f(x - h)` over `h ∈ d`.
pub fn dilate_flat(f: &Image, d: &FlatDomain) -> Field {
    build_field(
        f,
        extreme_field(
            f.width(),
            f.height(),
            f.values(),
            d.offsets(),
            None,
            true,
            true,
        ),
    )
}

/// Flat erosion: at each valid `x`, the infimum of `f(x + h)` over `h ∈ d`.
pub fn erode_flat(f: &Image, d: &FlatDomain) -> Field {
    build_field(
        f,
        extreme_field(
            f.width(),
            f.height(),
            f.values(),
            d.offsets(),
            None,
            false,
            false,
        ),
    )
}

/// Functional dilation `sup_h f(x - h) + B(h)`. Values may exceed `M`; the
/// result lives in the plain real lattice, not the LIP cone.
pub fn dilate_fn(f: &Image, b: &StructuringFunction) -> Field {
    build_field(
        f,
        extreme_field(
            f.width(),
            f.height(),
            f.values(),
            b.offsets(),
            Some(b.values()),
            true,
            true,
        ),
    )
}

/// Functional erosion `inf_h f(x + h) - B(h)`. Values may go below 0.
pub fn erode_fn(f: &Image, b: &StructuringFunction) -> Field {
    let negated: Vec<f64> = b.values().iter().map(|&v| -v).collect();
    build_field(
        f,
        extreme_field(
            f.width(),
            f.height(),
            f.values(),
            b.offsets(),
            Some(&negated),
            false,
            false,
        ),
    )
}

/// Sliding order statistic: the `rank`-th smallest of `{ f(x + h) : h ∈ d }`,
/// 1-based. Rank 1 is [`erode_flat`]; rank `|d|` is the window maximum (the
/// dilation of the reflected domain).
pub fn rank_filter(f: &Image, d: &FlatDomain, rank: usize) -> Result<Field> {
    let n = d.len();
    if rank < 1 || rank > n {
        return Err(Error::Parameter(format!("rank {rank} outside 1..={n}")));
    }
    let (width, height) = (f.width(), f.height());
    let values = f.values();
    let mut out = vec![f64::INFINITY; width * height];
    let mut valid = vec![false; width * height];
    let mut window = Vec::with_capacity(n);
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            window.clear();
            let mut ok = true;
            for &(dx, dy) in d.offsets() {
                let (sx, sy) = (x + dx, y + dy);
                if sx < 0 || sx >= width as i64 || sy < 0 || sy >= height as i64 {
                    ok = false;
                    break;
                }
                window.push(values[(sy * width as i64 + sx) as usize]);
            }
            if ok {
                window.sort_unstable_by(f64::total_cmp);
                let idx = (y * width as i64 + x) as usize;
                out[idx] = window[rank - 1];
                valid[idx] = true;
            }
        }
    }
    Field::new(width, height, out, valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scale() -> GreyScale {
        GreyScale::default()
    }

    fn row(values: &[f64]) -> Image {
        Image::from_vec(values.len(), 1, values.to_vec(), scale()).unwrap()
    }

    fn line3() -> FlatDomain {
        FlatDomain::new(vec![(-1, 0), (0, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn reflect_negates_and_is_an_involution() {
        let d = FlatDomain::new(vec![(1, 0), (0, 2)]).unwrap();
        assert_eq!(d.reflect().offsets(), &[(-1, 0), (0, -2)]);
        assert_eq!(d.reflect().reflect(), d);
        let sym = FlatDomain::new(vec![(0, 0)]).unwrap();
        assert_eq!(sym.reflect(), sym);
    }

    #[test]
    fn domain_validation() {
        assert!(matches!(FlatDomain::new(vec![]), Err(Error::Parameter(_))));
        assert!(matches!(
            FlatDomain::new(vec![(0, 0), (0, 0)]),
            Err(Error::Parameter(_))
        ));
        let r = FlatDomain::rect(-1, -1, 3, 3).unwrap();
        assert_eq!(r.len(), 9);
        assert!(r.offsets().contains(&(-1, -1)));
        assert!(r.offsets().contains(&(1, 1)));
    }

    #[test]
    fn structuring_function_validation() {
        let s = scale();
        assert!(matches!(
            StructuringFunction::new(vec![(0, 0)], vec![0.0], s),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            StructuringFunction::new(vec![(0, 0)], vec![256.0], s),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            StructuringFunction::new(vec![(0, 0)], vec![1.0, 2.0], s),
            Err(Error::Parameter(_))
        ));
        let flat = StructuringFunction::flat(&line3(), 128.0, s).unwrap();
        assert!(flat.is_flat());
        let bumpy = StructuringFunction::new(vec![(0, 0), (1, 0)], vec![10.0, 20.0], s).unwrap();
        assert!(!bumpy.is_flat());
    }

    #[test]
    fn flat_operators_on_the_worked_row() {
        let f = row(&[10.0, 20.0, 30.0]);
        let d = line3();

        let dil = dilate_flat(&f, &d);
        assert!(dil.is_valid(1, 0) && !dil.is_valid(0, 0) && !dil.is_valid(2, 0));
        assert_eq!(dil.get(1, 0), 30.0);

        let ero = erode_flat(&f, &d);
        assert!(ero.is_valid(1, 0) && !ero.is_valid(0, 0));
        assert_eq!(ero.get(1, 0), 10.0);
    }

    #[test]
    fn singleton_origin_is_the_identity() {
        let f = row(&[10.0, 20.0, 30.0]);
        let d = FlatDomain::new(vec![(0, 0)]).unwrap();
        for field in [dilate_flat(&f, &d), erode_flat(&f, &d)] {
            assert_eq!(field.values(), f.values());
            assert!(field.valid_mask().iter().all(|&ok| ok));
        }
    }

    #[test]
    fn constant_images_are_fixed_points() {
        let f = Image::constant(5, 4, 77.0, scale()).unwrap();
        let d = FlatDomain::rect(-1, -1, 3, 3).unwrap();
        let dil = dilate_flat(&f, &d);
        let ero = erode_flat(&f, &d);
        for y in 1..3 {
            for x in 1..4 {
                assert_eq!(dil.get(x, y), 77.0);
                assert_eq!(ero.get(x, y), 77.0);
            }
        }
        assert!(!dil.is_valid(0, 0) && !ero.is_valid(4, 3));
    }

    #[test]
    fn functional_operators_on_the_worked_row() {
        let f = row(&[10.0, 20.0, 30.0]);
        let b =
            StructuringFunction::new(vec![(-1, 0), (0, 0), (1, 0)], vec![5.0, 1.0, 5.0], scale())
                .unwrap();

        let dil = dilate_fn(&f, &b);
        assert_eq!(dil.get(1, 0), 35.0);

        let ero = erode_fn(&f, &b);
        assert_eq!(ero.get(1, 0), 5.0);
    }

    #[test]
    fn functional_singleton_shifts_by_the_value() {
        let f = row(&[10.0, 20.0, 30.0]);
        let b = StructuringFunction::new(vec![(0, 0)], vec![7.0], scale()).unwrap();
        assert_eq!(dilate_fn(&f, &b).values(), &[17.0, 27.0, 37.0]);
        assert_eq!(erode_fn(&f, &b).values(), &[3.0, 13.0, 23.0]);
    }

    #[test]
    fn flat_functional_operators_reduce_to_flat_ones() {
        let f = Image::from_fn(6, 5, scale(), |x, y| ((x * 41 + y * 17) % 256) as f64).unwrap();
        let d = FlatDomain::new(vec![(-1, 0), (1, 1), (0, -1), (2, 0)]).unwrap();
        let b = StructuringFunction::flat(&d, 33.0, scale()).unwrap();

        let dil_fn = dilate_fn(&f, &b);
        let dil_flat = dilate_flat(&f, &d);
        let ero_fn = erode_fn(&f, &b);
        let ero_flat = erode_flat(&f, &d);
        assert_eq!(dil_fn.valid_mask(), dil_flat.valid_mask());
        assert_eq!(ero_fn.valid_mask(), ero_flat.valid_mask());
        for i in 0..f.values().len() {
            if dil_flat.valid_mask()[i] {
                assert_eq!(dil_fn.values()[i], dil_flat.values()[i] + 33.0);
            }
            if ero_flat.valid_mask()[i] {
                assert_eq!(ero_fn.values()[i], ero_flat.values()[i] - 33.0);
            }
        }
    }

    #[test]
    fn rank_filter_matches_order_statistics() {
        let f = row(&[10.0, 20.0, 30.0]);
        let d = line3();
        assert_eq!(rank_filter(&f, &d, 2).unwrap().get(1, 0), 20.0);
        assert!(matches!(rank_filter(&f, &d, 0), Err(Error::Parameter(_))));
        assert!(matches!(rank_filter(&f, &d, 4), Err(Error::Parameter(_))));
    }

    fn naive_window(
        f: &Image,
        offsets: &[(i64, i64)],
        sample_minus: bool,
        x: usize,
        y: usize,
    ) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        for &(dx, dy) in offsets {
            let (sx, sy) = if sample_minus {
                (x as i64 - dx, y as i64 - dy)
            } else {
                (x as i64 + dx, y as i64 + dy)
            };
            if sx < 0 || sy < 0 || sx >= f.width() as i64 || sy >= f.height() as i64 {
                return None;
            }
            out.push(f.get(sx as usize, sy as usize));
        }
        Some(out)
    }

    fn arb_image() -> impl Strategy<Value = Image> {
        proptest::collection::vec(0u16..=255, 36).prop_map(|v| {
            Image::from_vec(
                6,
                6,
                v.into_iter().map(f64::from).collect(),
                GreyScale::default(),
            )
            .unwrap()
        })
    }

    fn arb_domain() -> impl Strategy<Value = FlatDomain> {
        proptest::collection::hash_set((-2i64..=2, -2i64..=2), 1..=9).prop_map(|set| {
            let mut offsets: Vec<_> = set.into_iter().collect();
            offsets.sort_unstable();
            FlatDomain::new(offsets).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn kernels_match_the_naive_oracle(f in arb_image(), d in arb_domain()) {
            let dil = dilate_flat(&f, &d);
            let ero = erode_flat(&f, &d);
            let ranked: Vec<Field> =
                (1..=d.len()).map(|r| rank_filter(&f, &d, r).unwrap()).collect();
            for y in 0..f.height() {
                for x in 0..f.width() {
                    let wmax = naive_window(&f, d.offsets(), true, x, y);
                    prop_assert_eq!(dil.is_valid(x, y), wmax.is_some());
                    if let Some(w) = wmax {
                        prop_assert_eq!(dil.get(x, y), w.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
                    }
                    let wmin = naive_window(&f, d.offsets(), false, x, y);
                    prop_assert_eq!(ero.is_valid(x, y), wmin.is_some());
                    if let Some(mut w) = wmin {
                        w.sort_unstable_by(f64::total_cmp);
                        prop_assert_eq!(ero.get(x, y), w[0]);
                        for (rf, &expected) in ranked.iter().zip(&w) {
                            prop_assert!(rf.is_valid(x, y));
                            prop_assert_eq!(rf.get(x, y), expected);
                        }
                    }
                }
            }
        }

        #[test]
        fn erosion_is_the_negated_dilation_of_the_reflection(f in arb_image(), d in arb_domain()) {
            let ero = erode_flat(&f, &d);
            let negated: Vec<f64> = f.values().iter().map(|&v| -v).collect();
            let (dil_neg, dil_valid) = extreme_field(
                f.width(), f.height(), &negated, d.reflect().offsets(), None, true, true,
            );
            prop_assert_eq!(ero.valid_mask(), &dil_valid[..]);
            for i in 0..dil_neg.len() {
                if dil_valid[i] {
                    prop_assert_eq!(ero.values()[i], -dil_neg[i]);
                }
            }
        }

        #[test]
        fn dilation_distributes_over_sup_erosion_over_inf(f in arb_image(), g in arb_image(), d in arb_domain()) {
            let sup = Image::from_fn(6, 6, GreyScale::default(), |x, y| f.get(x, y).max(g.get(x, y))).unwrap();
            let inf = Image::from_fn(6, 6, GreyScale::default(), |x, y| f.get(x, y).min(g.get(x, y))).unwrap();
            let (df, dg, dsup) = (dilate_flat(&f, &d), dilate_flat(&g, &d), dilate_flat(&sup, &d));
            let (ef, eg, einf) = (erode_flat(&f, &d), erode_flat(&g, &d), erode_flat(&inf, &d));
            for y in 0..6 {
                for x in 0..6 {
                    if dsup.is_valid(x, y) {
                        prop_assert_eq!(dsup.get(x, y), df.get(x, y).max(dg.get(x, y)));
                    }
                    if einf.is_valid(x, y) {
                        prop_assert_eq!(einf.get(x, y), ef.get(x, y).min(eg.get(x, y)));
                    }
                }
            }
        }

        #[test]
        fn operators_are_monotone_and_sandwich_the_image(f in arb_image(), g in arb_image(), d in arb_domain()) {
            let lo = Image::from_fn(6, 6, GreyScale::default(), |x, y| f.get(x, y).min(g.get(x, y))).unwrap();
            let hi = Image::from_fn(6, 6, GreyScale::default(), |x, y| f.get(x, y).max(g.get(x, y))).unwrap();
            let (dlo, dhi) = (dilate_flat(&lo, &d), dilate_flat(&hi, &d));
            let (elo, ehi) = (erode_flat(&lo, &d), erode_flat(&hi, &d));
            let mut with_origin: Vec<_> = d.offsets().to_vec();
            if !with_origin.contains(&(0, 0)) {
                with_origin.push((0, 0));
            }
            let d0 = FlatDomain::new(with_origin).unwrap();
            let (d0lo, e0lo) = (dilate_flat(&lo, &d0), erode_flat(&lo, &d0));
            for y in 0..6 {
                for x in 0..6 {
                    if dlo.is_valid(x, y) {
                        prop_assert!(dlo.get(x, y) <= dhi.get(x, y));
                    }
                    if elo.is_valid(x, y) {
                        prop_assert!(elo.get(x, y) <= ehi.get(x, y));
                    }
                    if d0lo.is_valid(x, y) {
                        prop_assert!(lo.get(x, y) <= d0lo.get(x, y));
                    }
                    if e0lo.is_valid(x, y) {
                        prop_assert!(e0lo.get(x, y) <= lo.get(x, y));
                    }
                }
            }
        }
    }
}
