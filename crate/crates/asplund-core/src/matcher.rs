//! Pattern matching on distance maps: probe extraction, thresholded-minima
//! detection, and synthetic scene generation for end-to-end runs.

use std::collections::VecDeque;

use rand::Rng;

use crate::asplund::{DistanceMap, PositivityPolicy};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::lip::scalar_mul_value;
use crate::morpho::{FlatDomain, StructuringFunction};

/// One detected match: the argmin pixel of a below-threshold connected
/// component of the distance map, its distance, and the component size.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub x: usize,
    pub y: usize,
    pub score: f64,
    pub extent: usize,
}

/// Pixel adjacency used when grouping below-threshold pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn neighbors(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

/// Reads the probe off an image: offsets of `mask` relative to `anchor`,
/// values sampled there. Values must land strictly inside `]0, M[` after the
/// positivity policy is applied (the clamp floor rescues white pixels;
/// strict mode refuses them).
pub fn extract_probe(
    f: &Image,
    anchor: (usize, usize),
    mask: &FlatDomain,
    policy: PositivityPolicy,
) -> Result<StructuringFunction> {
    let m = f.scale().m();
    let floor = match policy {
        PositivityPolicy::Clamp { floor } => {
            if !floor.is_finite() || floor < 0.0 || floor >= m {
                return Err(Error::Parameter(format!(
                    "clamp floor {floor} must lie in [0, {m}["
                )));
            }
            floor
        }
        PositivityPolicy::Strict => 0.0,
    };
    let mut values = Vec::with_capacity(mask.len());
    for &(dx, dy) in mask.offsets() {
        let sx = anchor.0 as i64 + dx;
        let sy = anchor.1 as i64 + dy;
        if sx < 0 || sy < 0 || sx >= f.width() as i64 || sy >= f.height() as i64 {
            return Err(Error::Extraction(format!(
                "mask offset ({dx}, {dy}) at anchor ({}, {}) leaves the {}x{} image",
                anchor.0,
                anchor.1,
                f.width(),
                f.height()
            )));
        }
        let v = f.get(sx as usize, sy as usize).max(floor);
        if !(v > 0.0 && v < m) {
            return Err(Error::Extraction(format!(
                "pixel ({sx}, {sy}) has grey tone {v}, outside ]0, {m}["
            )));
        }
        values.push(v);
    }
    StructuringFunction::new(mask.offsets().to_vec(), values, f.scale())
}

/// Thresholded-minima detection: connected components of
/// `{ valid pixels with value < threshold }`, one detection per component at
/// its argmin (row-major tie break), sorted by ascending score.
pub fn detect(
    map: &DistanceMap,
    threshold: f64,
    connectivity: Connectivity,
) -> Result<Vec<Detection>> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Parameter(format!(
            "threshold {threshold} must be positive"
        )));
    }
    let (width, height) = (map.width(), map.height());
    let values = map.field().values();
    let valid = map.field().valid_mask();
    let below = |i: usize| valid[i] && values[i] < threshold;

    let mut visited = vec![false; width * height];
    let mut detections = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..width * height {
        if visited[start] || !below(start) {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut best = start;
        let mut extent = 0usize;
        while let Some(i) = queue.pop_front() {
            extent += 1;
            if values[i] < values[best] || (values[i] == values[best] && i < best) {
                best = i;
            }
            let (x, y) = ((i % width) as i64, (i / width) as i64);
            for &(dx, dy) in connectivity.neighbors() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let ni = (ny * width as i64 + nx) as usize;
                if !visited[ni] && below(ni) {
                    visited[ni] = true;
                    queue.push_back(ni);
                }
            }
        }
        detections.push(Detection {
            x: best % width,
            y: best / width,
            score: values[best],
            extent,
        });
    }
    detections.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(detections)
}

/// One planted pattern copy: where its origin offset lands and the LIP
/// homothety factor applied to its values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub anchor: (usize, usize),
    pub k: f64,
}

/// A synthesized image together with the ground-truth anchors, in plant
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: Image,
    pub anchors: Vec<(usize, usize)>,
}

/// Paints `k ⊗ pattern` at each plant's anchor over a constant background.
/// Plants must fit inside the canvas and must not overlap each other.
pub fn synthesize_scene(
    width: usize,
    height: usize,
    background: f64,
    pattern: &StructuringFunction,
    plants: &[Plant],
) -> Result<Scene> {
    let m = pattern.scale().m();
    if !(0.0..m).contains(&background) {
        return Err(Error::Generation(format!(
            "background {background} outside [0, {m}["
        )));
    }
    let mut values = vec![background; width * height];
    let mut painted = vec![false; width * height];
    for (pi, plant) in plants.iter().enumerate() {
        if !(plant.k > 0.0 && plant.k.is_finite()) {
            return Err(Error::Generation(format!(
                "plant {pi} has homothety factor {}, not a positive real",
                plant.k
            )));
        }
        for (&(dx, dy), &bv) in pattern.offsets().iter().zip(pattern.values()) {
            let sx = plant.anchor.0 as i64 + dx;
            let sy = plant.anchor.1 as i64 + dy;
            if sx < 0 || sy < 0 || sx >= width as i64 || sy >= height as i64 {
                return Err(Error::Generation(format!(
                    "plant {pi} at ({}, {}) leaves the {width}x{height} canvas",
                    plant.anchor.0, plant.anchor.1
                )));
            }
            let idx = (sy * width as i64 + sx) as usize;
            if painted[idx] {
                return Err(Error::Generation(format!(
                    "plant {pi} overlaps an earlier plant at ({sx}, {sy})"
                )));
            }
            painted[idx] = true;
            values[idx] = scalar_mul_value(plant.k, bv, m);
        }
    }
    Ok(Scene {
        image: Image::from_vec(width, height, values, pattern.scale())?,
        anchors: plants.iter().map(|p| p.anchor).collect(),
    })
}

/// Adds continuous uniform noise in `[-amplitude, amplitude]` to every
/// pixel, clamping back into `[0, M-1]`.
pub fn add_uniform_noise<R: Rng + ?Sized>(f: &Image, amplitude: f64, rng: &mut R) -> Result<Image> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::Parameter(format!(
            "noise amplitude {amplitude} must be a nonnegative real"
        )));
    }
    let m = f.scale().m();
    let values = f
        .values()
        .iter()
        .map(|&v| (v + rng.random_range(-amplitude..=amplitude)).clamp(0.0, m - 1.0))
        .collect();
    Image::from_vec(f.width(), f.height(), values, f.scale())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asplund::{distance_map_general, distance_map_tolerance};
    use crate::field::Field;
    use crate::lip::{scalar_mul, GreyScale};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scale() -> GreyScale {
        GreyScale::default()
    }

    fn clamp() -> PositivityPolicy {
        PositivityPolicy::default()
    }

    fn textured(width: usize, height: usize) -> Image {
        Image::from_fn(width, height, scale(), |x, y| {
            ((x * 67 + y * 139 + x * y * 11) % 254 + 1) as f64
        })
        .unwrap()
    }

    fn lshape_mask() -> FlatDomain {
        FlatDomain::new(vec![(-1, -1), (0, -1), (-1, 0), (0, 0), (0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn extract_preserves_offsets_and_samples_values() {
        let f = textured(10, 10);
        let mask = lshape_mask();
        let b = extract_probe(&f, (4, 5), &mask, clamp()).unwrap();
        assert_eq!(b.offsets(), mask.offsets());
        for (&(dx, dy), &v) in b.offsets().iter().zip(b.values()) {
            assert_eq!(v, f.get((4 + dx) as usize, (5 + dy) as usize));
        }
    }

    #[test]
    fn extract_rejects_out_of_image_masks() {
        let f = textured(5, 5);
        let mask = lshape_mask();
        assert!(matches!(
            extract_probe(&f, (0, 0), &mask, clamp()),
            Err(Error::Extraction(_))
        ));
    }

    #[test]
    fn extract_policy_governs_white_pixels() {
        let mut values = vec![100.0; 16];
        values[5] = 0.0;
        let f = Image::from_vec(4, 4, values, scale()).unwrap();
        let mask = FlatDomain::rect(0, 0, 2, 2).unwrap();
        let clamped = extract_probe(&f, (1, 1), &mask, clamp()).unwrap();
        assert_eq!(clamped.values()[0], 1.0);
        assert!(matches!(
            extract_probe(&f, (1, 1), &mask, PositivityPolicy::Strict),
            Err(Error::Extraction(_))
        ));
    }

    #[test]
    fn self_match_scores_zero_at_the_anchor() {
        let f = textured(12, 12);
        let mask = lshape_mask();
        let anchor = (6, 6);
        let b = extract_probe(&f, anchor, &mask, clamp()).unwrap();
        let map = distance_map_general(&f, &b, clamp()).unwrap();
        assert_eq!(map.get(anchor.0, anchor.1), 0.0);
        let dets = detect(&map, 0.05, Connectivity::Eight).unwrap();
        assert!(dets.iter().any(|d| (d.x, d.y) == anchor && d.score == 0.0));
    }

    #[test]
    fn detect_returns_empty_above_threshold_maps() {
        let field = Field::all_valid(3, 3, vec![2.0; 9]).unwrap();
        let map = DistanceMap::new(field, 0.0).unwrap();
        assert!(detect(&map, 0.5, Connectivity::Eight).unwrap().is_empty());
        assert!(matches!(
            detect(&map, 0.0, Connectivity::Eight),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn connectivity_splits_or_joins_diagonal_components() {
        // Two below-threshold pixels touch only diagonally.
        let mut values = vec![1.0; 16];
        values[5] = 0.1;
        values[10] = 0.2;
        let map = DistanceMap::new(Field::all_valid(4, 4, values).unwrap(), 0.0).unwrap();
        let eight = detect(&map, 0.5, Connectivity::Eight).unwrap();
        assert_eq!(eight.len(), 1);
        assert_eq!((eight[0].x, eight[0].y, eight[0].extent), (1, 1, 2));
        let four = detect(&map, 0.5, Connectivity::Four).unwrap();
        assert_eq!(four.len(), 2);
        assert_eq!((four[0].x, four[0].y), (1, 1));
        assert_eq!((four[1].x, four[1].y), (2, 2));
    }

    #[test]
    fn argmin_ties_break_row_major_and_results_sort_by_score() {
        let mut values = vec![1.0; 25];
        // component A: plateau of equal scores
        values[6] = 0.3;
        values[7] = 0.3;
        // component B: lower score, later in the grid
        values[18] = 0.1;
        let map = DistanceMap::new(Field::all_valid(5, 5, values).unwrap(), 0.0).unwrap();
        let dets = detect(&map, 0.5, Connectivity::Eight).unwrap();
        assert_eq!(dets.len(), 2);
        assert_eq!((dets[0].x, dets[0].y, dets[0].score), (3, 3, 0.1));
        assert_eq!((dets[1].x, dets[1].y, dets[1].score), (1, 1, 0.3));
        assert_eq!(dets[1].extent, 2);
    }

    #[test]
    fn detections_skip_invalid_pixels() {
        let values = vec![0.1; 9];
        let mut valid = vec![true; 9];
        valid[0] = false;
        let map = DistanceMap::new(Field::new(3, 3, values, valid).unwrap(), 0.0).unwrap();
        let dets = detect(&map, 0.5, Connectivity::Eight).unwrap();
        assert_eq!(dets.len(), 1);
        assert_eq!((dets[0].x, dets[0].y, dets[0].extent), (1, 0, 8));
    }

    #[test]
    fn scene_plants_exact_copies_at_unit_factor() {
        let b = extract_probe(&textured(8, 8), (3, 3), &lshape_mask(), clamp()).unwrap();
        let scene = synthesize_scene(
            20,
            20,
            128.0,
            &b,
            &[Plant {
                anchor: (10, 10),
                k: 1.0,
            }],
        )
        .unwrap();
        for (&(dx, dy), &v) in b.offsets().iter().zip(b.values()) {
            let px = (10 + dx) as usize;
            let py = (10 + dy) as usize;
            assert!((scene.image.get(px, py) - v).abs() < 1e-12);
        }
        assert_eq!(scene.anchors, vec![(10, 10)]);

        let empty = synthesize_scene(6, 6, 40.0, &b, &[]).unwrap();
        assert!(empty.image.values().iter().all(|&v| v == 40.0));
    }

    #[test]
    fn scene_rejects_overlap_and_out_of_canvas_plants() {
        let b = extract_probe(&textured(8, 8), (3, 3), &lshape_mask(), clamp()).unwrap();
        let overlapping = [
            Plant {
                anchor: (5, 5),
                k: 1.0,
            },
            Plant {
                anchor: (6, 6),
                k: 1.0,
            },
        ];
        assert!(matches!(
            synthesize_scene(20, 20, 128.0, &b, &overlapping),
            Err(Error::Generation(_))
        ));
        assert!(matches!(
            synthesize_scene(
                20,
                20,
                128.0,
                &b,
                &[Plant {
                    anchor: (0, 0),
                    k: 1.0
                }]
            ),
            Err(Error::Generation(_))
        ));
        assert!(matches!(
            synthesize_scene(
                20,
                20,
                128.0,
                &b,
                &[Plant {
                    anchor: (5, 5),
                    k: 0.0
                }]
            ),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn noise_is_bounded_and_seeded_runs_repeat() {
        let f = textured(16, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noisy = add_uniform_noise(&f, 2.0, &mut rng).unwrap();
        for (a, b) in noisy.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= 2.0 + 1e-12);
            assert!(*a >= 0.0 && *a <= 255.0);
        }
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let again = add_uniform_noise(&f, 2.0, &mut rng2).unwrap();
        assert_eq!(noisy.values(), again.values());
    }

    #[test]
    fn detections_are_invariant_under_lip_darkening() {
        let f = textured(24, 24);
        let mask = lshape_mask();
        let b = extract_probe(&f, (11, 13), &mask, clamp()).unwrap();
        let base = detect(
            &distance_map_tolerance(&f, &b, 0.1, clamp()).unwrap(),
            0.7,
            Connectivity::Eight,
        )
        .unwrap();
        assert!(!base.is_empty());
        for k in [0.3, 1.0, 2.0] {
            let darkened = scalar_mul(k, &f).unwrap();
            let dets = detect(
                &distance_map_tolerance(&darkened, &b, 0.1, clamp()).unwrap(),
                0.7,
                Connectivity::Eight,
            )
            .unwrap();
            let mut pos: Vec<_> = dets.iter().map(|d| (d.x, d.y)).collect();
            let mut base_pos: Vec<_> = base.iter().map(|d| (d.x, d.y)).collect();
            pos.sort_unstable();
            base_pos.sort_unstable();
            assert_eq!(pos, base_pos, "k={k}");
        }
    }
}
