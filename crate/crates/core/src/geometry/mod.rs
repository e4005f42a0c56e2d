//! Metric-generic tensor calculus on a single coordinate chart.
//!
//! Derivatives of the metric are taken by central differences (or supplied in
//! closed form through [`MetricSpec::with_partials`]); Christoffel symbols,
//! Riemann/Ricci/scalar curvature, sectional and Gauss curvature, Lie brackets
//! and covariant derivatives are all built on top of that jet.

mod curvature;
mod jet;
mod metric;

pub use curvature::{ChristoffelSymbols, CurvatureBundle, Kernel};
pub use metric::{ChartPoint, MetricSpec, TangentVector, VectorField};
