//! Numeric tolerances shared by the kernel.
//!
//! Every threshold lives in [`Tolerances`]; the defaults are the values the
//! test-suite is calibrated against and any field can be overridden per call.

/// Relative eigenvalue floor for positive-definiteness: `min_eig > ratio * max_eig`.
pub const DEGENERATE_EIG_RATIO: f64 = 1e-12;

/// Absolute floor on `det g`.
pub const MIN_DETERMINANT: f64 = 1e-300;

/// `S(X, Y)` below this (relative to `|X|^2 |Y|^2`) is treated as a degenerate plane.
pub const MIN_PLANE_AREA: f64 = 1e-12;

/// Asymmetry allowed in a metric matrix, relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Gram-matrix deviation allowed for an orthonormal frame.
pub const FRAME_GRAM_TOL: f64 = 1e-10;

/// `|cos(theta)|` below this makes `tan(theta)` singular.
pub const TANGENT_COS_MIN: f64 = 1e-10;

/// Relative tolerance of adaptive Simpson quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Step factor for first derivatives: `h = factor * max(1, |x|)`.
    pub first_step: f64,
    /// Step factor for second derivatives (refined once by Richardson extrapolation).
    pub second_step: f64,
    pub degenerate_eig_ratio: f64,
    pub min_determinant: f64,
    pub min_plane_area: f64,
    pub symmetry: f64,
    pub frame_gram: f64,
    pub tangent_cos_min: f64,
    pub quadrature_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            first_step: f64::EPSILON.cbrt(),
            second_step: f64::EPSILON.powf(1.0 / 6.0),
            degenerate_eig_ratio: DEGENERATE_EIG_RATIO,
            min_determinant: MIN_DETERMINANT,
            min_plane_area: MIN_PLANE_AREA,
            symmetry: SYMMETRY_TOL,
            frame_gram: FRAME_GRAM_TOL,
            tangent_cos_min: TANGENT_COS_MIN,
            quadrature_rel: QUADRATURE_REL_TOL,
        }
    }
}

impl Tolerances {
    pub fn first_step_at(&self, x: f64) -> f64 {
        self.first_step * x.abs().max(1.0)
    }

    pub fn second_step_at(&self, x: f64) -> f64 {
        self.second_step * x.abs().max(1.0)
    }
}
