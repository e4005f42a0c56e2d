//! Numeric differential geometry and fast-dynamo diagnostics for twisted
//! magnetic flux tubes.
//!
//! * [`geometry`]: metric-generic Christoffel symbols, Riemann/Ricci/scalar,
//!   sectional and Gauss curvature, Lie brackets, covariant derivatives.
//! * [`flux_tube`]: tube metric families, twist angle, Frenet data and the
//!   closed-form tube curvatures.
//! * [`ricci_flow`]: pointwise Ricci flow, the Ricci eigenproblem and the tube
//!   Lyapunov spectrum.
//! * [`dynamo`]: finite-time Lyapunov exponents, dynamo criteria, field growth
//!   and the diffusive geodesic-flow dynamo eigenvalue.
//! * [`criteria`]: the acceptance checks, shared by the test-suite and the CLI
//!   `verify` command.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod criteria;
pub mod dynamo;
pub mod error;
pub mod flux_tube;
pub mod geometry;
pub mod linalg;
pub mod profile;
pub mod ricci_flow;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
