//! Real harmonic maps into a one-dimensional metric, their gradient bounds, and
//! the scalar inequalities those bounds rest on.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod disk;
pub mod error;
pub mod fd_oracle;
pub mod gallery;
pub mod harmonic;
pub mod lemma;
pub mod metric;
pub mod mollifier;
pub mod scalar;

pub use config::Tolerances;
pub use disk::{hyperbolic_distance, Mobius};
pub use error::{Error, Result};
pub use harmonic::{BoundaryData, BoundarySpec, HarmonicField, PoissonExtension, RHarmonicField};
pub use metric::{HTransform, Metric1D, MetricFamily, MetricSpec};
