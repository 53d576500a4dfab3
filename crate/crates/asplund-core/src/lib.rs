//! Maps of Asplund distances on grey-scale images under the logarithmic
//! image processing (LIP) model, for illumination-invariant template
//! matching.
//!
//! The LIP cone ([`lip`]) models grey tones as obstacle opacities on a
//! bounded scale `[0, M[` with 0 at white; its scalar multiplication
//! `k ⊗ f` is a physically meaningful exposure change. The Asplund distance
//! between a window of an image and a probe ([`asplund`]) is the log-ratio
//! of the smallest probe homothety dominating the window to the largest one
//! dominated by it, which makes it a metric on the equivalence classes
//! `{ k ⊗ f : k > 0 }`: a pattern is found at the same places whether the
//! scene was shot in daylight or darkened to a fraction of the exposure.
//! Sliding that window over the image yields a distance map, computed
//! through grey-level morphology ([`morpho`]); thresholded minima of the map
//! are matches ([`matcher`]). A rank-filter tolerance variant discards a
//! fraction of extreme window points for noise robustness.
//!
//! ```
//! use asplund_core::asplund::{distance_map_tolerance, PositivityPolicy};
//! use asplund_core::lip::{scalar_mul, GreyScale};
//! use asplund_core::matcher::{detect, extract_probe, Connectivity};
//! use asplund_core::morpho::FlatDomain;
//! use asplund_core::Image;
//!
//! let scene = Image::from_fn(32, 32, GreyScale::default(), |x, y| {
//!     ((x * 67 + y * 139 + x * y) % 254 + 1) as f64
//! })?;
//! let mask = FlatDomain::rect(-2, -2, 5, 5)?;
//! let probe = extract_probe(&scene, (16, 16), &mask, PositivityPolicy::default())?;
//!
//! // The darkened scene still matches at the anchor.
//! let dark = scalar_mul(0.3, &scene)?;
//! let map = distance_map_tolerance(&dark, &probe, 0.3, PositivityPolicy::default())?;
//! let hits = detect(&map, 0.7, Connectivity::Eight)?;
//! assert!(hits.iter().any(|d| (d.x, d.y) == (16, 16)));
//! # Ok::<(), asplund_core::Error>(())
//! ```

pub mod asplund;
pub mod error;
pub mod field;
pub mod image;
pub mod io;
pub mod lip;
pub mod matcher;
pub mod morpho;
pub mod oracle;

pub use asplund::{BoundKind, BoundMap, DistanceMap, PositivityPolicy};
pub use error::{Error, Result};
pub use field::Field;
pub use image::Image;
pub use lip::GreyScale;
pub use matcher::{Connectivity, Detection};
pub use morpho::{FlatDomain, StructuringFunction};
