//! Frenet apparatus of unit-speed curves in `E^n` and timelike curves in
//! Minkowski space, the `G_i` curvature functions, and four equivalent
//! tests for the cylindrical-helix property (tangent at a constant angle
//! with a fixed axis).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curve;
pub mod diff;
pub mod error;
pub mod frenet;
pub mod generators;
pub mod helix;
pub mod interp;
pub mod io;
pub mod metric;
pub mod par;
pub mod stats;

pub use curve::{AnalyticCurve, Certificate, CurveSamples};
pub use error::{Error, Result};
pub use frenet::{frenet_apparatus, frenet_residuals, FrenetData, FrenetOptions};
pub use helix::{classify_helix, HelixReport, Thresholds};
pub use metric::{Metric, Signature};
pub use par::Execution;
