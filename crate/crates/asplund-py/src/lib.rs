//! Python bindings: thin wrappers over the core types plus free functions
//! for the map/match pipeline. All numeric behaviour lives in the core
//! crate; these shims only translate values and errors.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use asplund_core as ac;
use asplund_core::io::{pfm, pgm, probe};
use asplund_core::{asplund, lip, matcher};

fn err(e: ac::Error) -> PyErr {
    match e {
        ac::Error::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn policy(clamp_floor: f64, strict: bool) -> ac::PositivityPolicy {
    if strict {
        ac::PositivityPolicy::Strict
    } else {
        ac::PositivityPolicy::Clamp { floor: clamp_floor }
    }
}

fn connectivity(name: &str) -> PyResult<ac::Connectivity> {
    match name {
        "four" => Ok(ac::Connectivity::Four),
        "eight" => Ok(ac::Connectivity::Eight),
        other => Err(PyValueError::new_err(format!(
            "connectivity must be \"four\" or \"eight\", got {other:?}"
        ))),
    }
}

/// Grey-tone image with values in [0, M] under the 0 = white convention.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Image {
    inner: ac::Image,
}

#[pymethods]
impl Image {
    #[new]
    #[pyo3(signature = (width, height, values, m=256.0))]
    fn new(width: usize, height: usize, values: Vec<f64>, m: f64) -> PyResult<Self> {
        let scale = ac::GreyScale::new(m).map_err(err)?;
        Ok(Image {
            inner: ac::Image::from_vec(width, height, values, scale).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, value, m=256.0))]
    fn constant(width: usize, height: usize, value: f64, m: f64) -> PyResult<Self> {
        let scale = ac::GreyScale::new(m).map_err(err)?;
        Ok(Image {
            inner: ac::Image::constant(width, height, value, scale).map_err(err)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.scale().m()
    }

    /// Row-major pixel values.
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<f64> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyIndexError::new_err(format!(
                "pixel ({x}, {y}) outside {}x{}",
                self.inner.width(),
                self.inner.height()
            )));
        }
        Ok(self.inner.get(x, y))
    }

    fn __repr__(&self) -> String {
        format!(
            "Image({}x{}, M={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.scale().m()
        )
    }
}

/// Structuring function: finite offset domain with values strictly inside
/// ]0, M[, used for double-sided probing.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Probe {
    inner: ac::StructuringFunction,
}

#[pymethods]
impl Probe {
    #[new]
    #[pyo3(signature = (offsets, values, m=256.0))]
    fn new(offsets: Vec<(i64, i64)>, values: Vec<f64>, m: f64) -> PyResult<Self> {
        let scale = ac::GreyScale::new(m).map_err(err)?;
        Ok(Probe {
            inner: ac::StructuringFunction::new(offsets, values, scale).map_err(err)?,
        })
    }

    /// Constant-valued probe over the given offsets.
    #[staticmethod]
    #[pyo3(signature = (offsets, level, m=256.0))]
    fn flat(offsets: Vec<(i64, i64)>, level: f64, m: f64) -> PyResult<Self> {
        let scale = ac::GreyScale::new(m).map_err(err)?;
        let domain = ac::FlatDomain::new(offsets).map_err(err)?;
        Ok(Probe {
            inner: ac::StructuringFunction::flat(&domain, level, scale).map_err(err)?,
        })
    }

    #[getter]
    fn offsets(&self) -> Vec<(i64, i64)> {
        self.inner.offsets().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.scale().m()
    }

    fn is_flat(&self) -> bool {
        self.inner.is_flat()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Probe({} offsets, M={})",
            self.inner.len(),
            self.inner.scale().m()
        )
    }
}

/// Distance map: per-pixel scores over the valid region, +inf elsewhere.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct DistanceMap {
    inner: ac::DistanceMap,
}

#[pymethods]
impl DistanceMap {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    /// Row-major scores; invalid pixels hold +inf.
    fn values(&self) -> Vec<f64> {
        self.inner.field().values().to_vec()
    }

    /// Row-major validity flags (windows fully inside the image).
    fn valid(&self) -> Vec<bool> {
        self.inner.field().valid_mask().to_vec()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<f64> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyIndexError::new_err(format!(
                "pixel ({x}, {y}) outside {}x{}",
                self.inner.width(),
                self.inner.height()
            )));
        }
        Ok(self.inner.get(x, y))
    }

    fn is_valid(&self, x: usize, y: usize) -> bool {
        x < self.inner.width() && y < self.inner.height() && self.inner.is_valid(x, y)
    }

    fn __repr__(&self) -> String {
        format!(
            "DistanceMap({}x{}, tolerance={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.tolerance()
        )
    }
}

/// One detected match: scored local minimum of a below-threshold region.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Detection {
    inner: ac::Detection,
}

#[pymethods]
impl Detection {
    #[getter]
    fn x(&self) -> usize {
        self.inner.x
    }

    #[getter]
    fn y(&self) -> usize {
        self.inner.y
    }

    #[getter]
    fn score(&self) -> f64 {
        self.inner.score
    }

    #[getter]
    fn extent(&self) -> usize {
        self.inner.extent
    }

    fn __repr__(&self) -> String {
        format!(
            "Detection(x={}, y={}, score={}, extent={})",
            self.inner.x, self.inner.y, self.inner.score, self.inner.extent
        )
    }
}

/// Pointwise bounded addition of two grey-tone images.
#[pyfunction]
fn lip_add(f: &Image, g: &Image) -> PyResult<Image> {
    Ok(Image {
        inner: lip::add(&f.inner, &g.inner).map_err(err)?,
    })
}

/// Multiplication of an image by a nonnegative real under the bounded law.
#[pyfunction]
fn lip_scalar_mul(k: f64, f: &Image) -> PyResult<Image> {
    Ok(Image {
        inner: lip::scalar_mul(k, &f.inner).map_err(err)?,
    })
}

/// Swap between the 0 = white working convention and the 0 = black file
/// convention: v -> (M - 1) - v.
#[pyfunction]
fn invert_convention(f: &Image) -> PyResult<Image> {
    Ok(Image {
        inner: lip::invert_convention(&f.inner).map_err(err)?,
    })
}

/// Distance between two same-shaped images: ln of the ratio between the
/// extreme per-pixel log-tone ratios. Zero exactly when one image is a
/// grey-scale multiple of the other.
#[pyfunction]
fn asplund_distance(f: &Image, g: &Image) -> PyResult<f64> {
    asplund::asplund_distance(&f.inner, &g.inner).map_err(err)
}

/// Sliding-window distance map between an image and a probe. `tolerance`
/// is the fraction of window points discarded at each bound.
#[pyfunction]
#[pyo3(signature = (f, probe, tolerance=0.0, clamp_floor=1.0, strict=false))]
fn distance_map(
    f: &Image,
    probe: &Probe,
    tolerance: f64,
    clamp_floor: f64,
    strict: bool,
) -> PyResult<DistanceMap> {
    let pol = policy(clamp_floor, strict);
    let inner = if tolerance == 0.0 {
        asplund::distance_map_general(&f.inner, &probe.inner, pol)
    } else {
        asplund::distance_map_tolerance(&f.inner, &probe.inner, tolerance, pol)
    }
    .map_err(err)?;
    Ok(DistanceMap { inner })
}

/// Distance map against a constant probe at `level` over `offsets`; the
/// level cancels and does not change the result.
#[pyfunction]
#[pyo3(signature = (f, level, offsets, tolerance=0.0, clamp_floor=1.0, strict=false))]
fn flat_distance_map(
    f: &Image,
    level: f64,
    offsets: Vec<(i64, i64)>,
    tolerance: f64,
    clamp_floor: f64,
    strict: bool,
) -> PyResult<DistanceMap> {
    let domain = ac::FlatDomain::new(offsets).map_err(err)?;
    let pol = policy(clamp_floor, strict);
    let inner = if tolerance == 0.0 {
        asplund::distance_map_flat(&f.inner, level, &domain, pol)
    } else {
        asplund::distance_map_flat_tolerance(&f.inner, level, &domain, tolerance, pol)
    }
    .map_err(err)?;
    Ok(DistanceMap { inner })
}

/// Read a probe off an image: `offsets` relative to `anchor`, values
/// sampled there.
#[pyfunction]
#[pyo3(signature = (f, anchor, offsets, clamp_floor=1.0, strict=false))]
fn extract_probe(
    f: &Image,
    anchor: (usize, usize),
    offsets: Vec<(i64, i64)>,
    clamp_floor: f64,
    strict: bool,
) -> PyResult<Probe> {
    let domain = ac::FlatDomain::new(offsets).map_err(err)?;
    Ok(Probe {
        inner: matcher::extract_probe(&f.inner, anchor, &domain, policy(clamp_floor, strict))
            .map_err(err)?,
    })
}

/// Detections on a map: one scored argmin per connected below-threshold
/// region, sorted by ascending score.
#[pyfunction]
#[pyo3(signature = (map, threshold, connectivity="eight"))]
fn detect(map: &DistanceMap, threshold: f64, connectivity: &str) -> PyResult<Vec<Detection>> {
    let conn = self::connectivity(connectivity)?;
    Ok(matcher::detect(&map.inner, threshold, conn)
        .map_err(err)?
        .into_iter()
        .map(|inner| Detection { inner })
        .collect())
}

/// Paint grey-scale multiples of a probe onto a constant background.
/// `plants` is a list of ((x, y), k) pairs; returns the scene image.
#[pyfunction]
fn synthesize_scene(
    width: usize,
    height: usize,
    background: f64,
    probe: &Probe,
    plants: Vec<((usize, usize), f64)>,
) -> PyResult<Image> {
    let plants: Vec<matcher::Plant> = plants
        .into_iter()
        .map(|(anchor, k)| matcher::Plant { anchor, k })
        .collect();
    let scene =
        matcher::synthesize_scene(width, height, background, &probe.inner, &plants).map_err(err)?;
    Ok(Image { inner: scene.image })
}

/// Add seeded uniform noise in [-amplitude, amplitude], clamped back into
/// the grey-tone range.
#[pyfunction]
fn add_uniform_noise(f: &Image, amplitude: f64, seed: u64) -> PyResult<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Image {
        inner: matcher::add_uniform_noise(&f.inner, amplitude, &mut rng).map_err(err)?,
    })
}

/// Read a P2/P5 portable graymap (maxval up to 255).
#[pyfunction]
#[pyo3(signature = (path, m=256.0))]
fn read_pgm(path: PathBuf, m: f64) -> PyResult<Image> {
    let scale = ac::GreyScale::new(m).map_err(err)?;
    Ok(Image {
        inner: pgm::read_pgm(&path, scale).map_err(err)?,
    })
}

/// Write an image as a portable graymap, rounding to 8-bit.
#[pyfunction]
#[pyo3(signature = (f, path, ascii=false))]
fn write_pgm(f: &Image, path: PathBuf, ascii: bool) -> PyResult<()> {
    let format = if ascii {
        pgm::PgmFormat::Ascii
    } else {
        pgm::PgmFormat::Binary
    };
    pgm::write_pgm(&f.inner, &path, format).map_err(err)
}

/// Write a map as 32-bit PFM plus a `<path>.mask.pgm` validity sidecar.
#[pyfunction]
#[pyo3(signature = (map, path, viz=None))]
fn write_map(map: &DistanceMap, path: PathBuf, viz: Option<PathBuf>) -> PyResult<()> {
    pfm::write_map(&map.inner, &path, viz.as_deref()).map_err(err)
}

/// Read a map written by `write_map`.
#[pyfunction]
fn read_map(path: PathBuf) -> PyResult<DistanceMap> {
    Ok(DistanceMap {
        inner: pfm::read_map(&path).map_err(err)?,
    })
}

/// Write a probe with its anchor as a diffable text file.
#[pyfunction]
fn write_probe(path: PathBuf, anchor: (i64, i64), p: &Probe) -> PyResult<()> {
    probe::write_probe(
        &probe::ProbeFile {
            anchor,
            probe: p.inner.clone(),
        },
        &path,
    )
    .map_err(err)
}

/// Read a probe text file; returns (anchor, probe).
#[pyfunction]
fn read_probe(path: PathBuf) -> PyResult<((i64, i64), Probe)> {
    let pf = probe::read_probe(&path).map_err(err)?;
    Ok((pf.anchor, Probe { inner: pf.probe }))
}

#[pymodule]
fn asplund_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Image>()?;
    m.add_class::<Probe>()?;
    m.add_class::<DistanceMap>()?;
    m.add_class::<Detection>()?;
    m.add_function(wrap_pyfunction!(lip_add, m)?)?;
    m.add_function(wrap_pyfunction!(lip_scalar_mul, m)?)?;
    m.add_function(wrap_pyfunction!(invert_convention, m)?)?;
    m.add_function(wrap_pyfunction!(asplund_distance, m)?)?;
    m.add_function(wrap_pyfunction!(distance_map, m)?)?;
    m.add_function(wrap_pyfunction!(flat_distance_map, m)?)?;
    m.add_function(wrap_pyfunction!(extract_probe, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_scene, m)?)?;
    m.add_function(wrap_pyfunction!(add_uniform_noise, m)?)?;
    m.add_function(wrap_pyfunction!(read_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_map, m)?)?;
    m.add_function(wrap_pyfunction!(read_map, m)?)?;
    m.add_function(wrap_pyfunction!(write_probe, m)?)?;
    m.add_function(wrap_pyfunction!(read_probe, m)?)?;
    Ok(())
}
