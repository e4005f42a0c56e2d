//! Twisted magnetic flux tube geometry.
//!
//! The tube is described in coordinates `(r, θ_R, s)` around an axis with
//! Frenet curvature `κ(s)` and torsion `τ(s)`. The line element is
//!
//! ```text
//! dl² = dr² + r² dθ_R² + K²(r, s) ds²,   K = 1 − r κ(s) cos θ(s),
//! θ(s) = θ_R − ∫₀ˢ τ(u) du
//! ```
//!
//! and the surface `r = r0` carries `dl² = r0² dθ_R² + K² ds²`. Besides the
//! metric families this module holds the closed-form curvature expressions
//! that the numeric kernel is compared against.

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, MetricSpec};
use crate::profile::Profile;
use crate::tolerances::{Tolerances, QUADRATURE_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TubeMode {
    /// `K ≡ 1`.
    #[default]
    Thin,
    /// Full `K = 1 − r κ cos θ`.
    Thick,
}

#[derive(Debug, Clone)]
pub struct TubeParams {
    pub kappa: Profile,
    pub tau: Profile,
    pub r0: f64,
    pub mode: TubeMode,
}

impl Default for TubeParams {
    fn default() -> Self {
        Self {
            kappa: Profile::Constant(1.0),
            tau: Profile::Constant(0.0),
            r0: 0.1,
            mode: TubeMode::Thin,
        }
    }
}

impl TubeParams {
    pub fn constant(kappa0: f64, tau0: f64, r0: f64, mode: TubeMode) -> Self {
        Self {
            kappa: kappa0.into(),
            tau: tau0.into(),
            r0,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r0.is_finite() {
            return Err(Error::NonFinite("r0"));
        }
        if self.r0 < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "r0 must be non-negative, got {}",
                self.r0
            )));
        }
        Ok(())
    }

    /// Metric stretching coefficient `K` at `(r, θ, s)` for an already-twisted `θ`.
    pub fn stretch(&self, r: f64, theta: f64, s: f64) -> f64 {
        match self.mode {
            TubeMode::Thin => 1.0,
            TubeMode::Thick => 1.0 - r * self.kappa.at(s) * theta.cos(),
        }
    }
}

/// `θ(s) = θ_R − ∫₀ˢ τ(u) du`.
pub fn twist_angle(params: &TubeParams, theta_r: f64, s: f64) -> Result<f64> {
    twist_angle_with(params, theta_r, s, QUADRATURE_REL_TOL)
}

pub fn twist_angle_with(params: &TubeParams, theta_r: f64, s: f64, rel_tol: f64) -> Result<f64> {
    if params.tau.is_zero() {
        return Ok(theta_r);
    }
    let turned = params
        .tau
        .integral(0.0, s, rel_tol)
        .map_err(|_| Error::NonFinite("torsion"))?;
    Ok(theta_r - turned)
}

/// Twisted angle for use inside metric closures; non-finite torsion shows up
/// as a NaN metric, which the kernel rejects.
fn twisted(params: &TubeParams, theta_r: f64, s: f64) -> f64 {
    twist_angle(params, theta_r, s).unwrap_or(f64::NAN)
}

/// Full 3D tube metric in `(r, θ_R, s)`. The domain is `r > 0, K > 0`.
pub fn tube_metric_3d(params: &TubeParams) -> MetricSpec {
    let eval_params = params.clone();
    let domain_params = params.clone();
    MetricSpec::new(3, move |p, _| {
        let (r, theta_r, s) = (p.coord(0), p.coord(1), p.coord(2));
        let k = eval_params.stretch(r, twisted(&eval_params, theta_r, s), s);
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, r * r, k * k]))
    })
    .with_domain(move |p| {
        let (r, theta_r, s) = (p.coord(0), p.coord(1), p.coord(2));
        r > 0.0 && domain_params.stretch(r, twisted(&domain_params, theta_r, s), s) > 0.0
    })
}

/// Tube surface `r = r0` in `(θ_R, s)`: `diag(r0², K²)` with `K = 1 − r0 κ(s) cos θ`.
pub fn tube_surface_metric(params: &TubeParams) -> Result<MetricSpec> {
    params.validate()?;
    if params.r0 <= 0.0 {
        return Err(Error::ZeroRadius);
    }
    let r0 = params.r0;
    let eval_params = params.clone();
    let domain_params = params.clone();
    Ok(MetricSpec::new(2, move |p, _| {
        let (theta_r, s) = (p.coord(0), p.coord(1));
        let k = eval_params.stretch(r0, twisted(&eval_params, theta_r, s), s);
        DMatrix::from_row_slice(2, 2, &[r0 * r0, 0.0, 0.0, k * k])
    })
    .with_domain(move |p| {
        let (theta_r, s) = (p.coord(0), p.coord(1));
        domain_params.stretch(r0, twisted(&domain_params, theta_r, s), s) > 0.0
    }))
}

/// Closed-form `R_1212 = −κ(s) K(s) cos θ` with `K = 1 − r0 κ(s) cos θ`.
///
/// The kernel's value on [`tube_surface_metric`] is `r0` times this; see
/// [`numeric_r1212_closed_form`].
pub fn analytic_r1212(params: &TubeParams, s: f64, theta: f64) -> f64 {
    let kappa = params.kappa.at(s);
    -kappa * params.stretch(params.r0, theta, s) * theta.cos()
}

/// `R_1212` of `diag(r0², K(θ)²)` worked out by hand for constant `κ`:
/// with `E = r0²` constant, `K_G = −(√G)_θθ / (E √G)` gives
/// `R_1212 = K_G · det g = −r0 κ K cos θ`.
pub fn numeric_r1212_closed_form(params: &TubeParams, s: f64, theta: f64) -> f64 {
    params.r0 * analytic_r1212(params, s, theta)
}

/// Which determinant enters `K_G = R_1212 / g` for the tube surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetConvention {
    /// `g = r0²`, giving `K_G = −κ K cos θ / r0`.
    #[default]
    RadiusSquared,
    /// `g = det g_ij = r0² K²`, giving `K_G = −κ cos θ / (r0 K)`.
    Determinant,
}

/// Closed-form Gauss curvature of the tube surface.
///
/// Thin mode collapses to `−κ0 cos θ / r0` under either convention.
pub fn analytic_gauss(
    params: &TubeParams,
    s: f64,
    theta: f64,
    convention: DetConvention,
) -> Result<f64> {
    if params.r0 == 0.0 {
        return Err(Error::ZeroRadius);
    }
    let kappa = params.kappa.at(s);
    let cos = theta.cos();
    Ok(match (params.mode, convention) {
        (TubeMode::Thin, _) => -kappa * cos / params.r0,
        (TubeMode::Thick, DetConvention::RadiusSquared) => {
            -kappa * params.stretch(params.r0, theta, s) * cos / params.r0
        }
        (TubeMode::Thick, DetConvention::Determinant) => {
            -kappa * cos / (params.r0 * params.stretch(params.r0, theta, s))
        }
    })
}

/// Thin-tube sign law: `K_G < 0` iff `κ cos θ > 0`.
pub fn negative_gauss_condition(params: &TubeParams, s: f64, theta: f64) -> bool {
    params.kappa.at(s) * theta.cos() > 0.0
}

/// Plasma flow inside the tube.
#[derive(Debug, Clone)]
pub struct FlowField {
    /// Radial velocity as a function of `r`.
    pub v_r: Profile,
    /// Azimuthal velocity as a function of `s`.
    pub v_theta: Profile,
    pub v_s: f64,
    /// Constant vorticity `ω1`.
    pub omega1: f64,
}

impl Default for FlowField {
    fn default() -> Self {
        Self::uniform(0.0, 0.0, 0.0, 0.0)
    }
}

impl FlowField {
    pub fn uniform(v_r: f64, v_theta: f64, v_s: f64, omega1: f64) -> Self {
        Self {
            v_r: v_r.into(),
            v_theta: v_theta.into(),
            v_s,
            omega1,
        }
    }

    /// True outside the compressive, axially dominated regime the dynamo
    /// estimates assume (`v_r < 0`, `|v_s| ≫ |v_θ|`). Reported, not enforced.
    pub fn outside_dynamo_regime(&self, r: f64, s: f64) -> bool {
        self.v_r.at(r) >= 0.0 || self.v_s.abs() < 10.0 * self.v_theta.at(s).abs()
    }
}

/// A vector in the tube frame `(e_θ, t, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector {
    pub e_theta: f64,
    pub t: f64,
    pub n: f64,
}

/// `R(X,Y)Y ≈ [v_s − τ⁻¹] (v_θ κ τ sin θ e_θ − τ v_θ sin θ t + v_s κ n)` for a
/// radial perturbation `X` and `Y = v_θ e_θ + v_s t`.
///
/// Valid only under the thin-tube closures (radial derivatives of `v_θ`, `v_s`
/// negligible, `∇_Y∇_X Y ≈ 0`, cubic terms dropped); these are not checked.
/// The prefactor mixes a velocity with a length.
pub fn riemann_xyy_tube(
    flow: &FlowField,
    params: &TubeParams,
    theta: f64,
    s: f64,
) -> Result<FrameVector> {
    let tau = params.tau.at(s);
    if tau == 0.0 {
        return Err(Error::ZeroTorsion(s));
    }
    let kappa = params.kappa.at(s);
    let v_theta = flow.v_theta.at(s);
    let v_s = flow.v_s;
    let pre = v_s - 1.0 / tau;
    let sin = theta.sin();
    Ok(FrameVector {
        e_theta: pre * v_theta * kappa * tau * sin,
        t: -pre * tau * v_theta * sin,
        n: pre * v_s * kappa,
    })
}

/// `K(X, Y) = κ(s) cos θ / (v¹_r v_s)` for the radially perturbed thin tube.
pub fn analytic_sectional(
    params: &TubeParams,
    flow: &FlowField,
    vr_pert: f64,
    theta: f64,
    s: f64,
) -> Result<f64> {
    if vr_pert == 0.0 {
        return Err(Error::ZeroVelocity("radial perturbation"));
    }
    if flow.v_s == 0.0 {
        return Err(Error::ZeroVelocity("axial"));
    }
    Ok(params.kappa.at(s) * theta.cos() / (vr_pert * flow.v_s))
}

/// `∂_s v_θ − κ τ r sin θ v_θ` at `p = (r, θ_R, s)`; zero when the
/// incompressibility closure holds.
pub fn incompressibility_residual(
    flow: &FlowField,
    params: &TubeParams,
    p: &ChartPoint,
    tol: &Tolerances,
) -> Result<f64> {
    if p.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.dim(),
        });
    }
    let (r, theta_r, s) = (p.coord(0), p.coord(1), p.coord(2));
    let theta = twist_angle_with(params, theta_r, s, tol.quadrature_rel)?;
    let h = tol.first_step_at(s);
    let plus = flow.v_theta.at(s + h);
    let minus = flow.v_theta.at(s - h);
    let here = flow.v_theta.at(s);
    if !(plus.is_finite() && minus.is_finite() && here.is_finite()) {
        return Err(Error::StencilOutOfDomain(vec![r, theta_r, s]));
    }
    let dvds = (plus - minus) / (2.0 * h);
    Ok(dvds - params.kappa.at(s) * params.tau.at(s) * r * theta.sin() * here)
}

/// Orthonormal tangent / normal / binormal triad along the tube axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub t_vec: Vector3<f64>,
    pub n_vec: Vector3<f64>,
    pub b_vec: Vector3<f64>,
}

impl FrenetFrame {
    /// Validates orthonormality and right-handedness (`b = t × n`).
    pub fn new(t_vec: Vector3<f64>, n_vec: Vector3<f64>, b_vec: Vector3<f64>) -> Result<Self> {
        let frame = Self {
            t_vec,
            n_vec,
            b_vec,
        };
        let dev = frame
            .gram_deviation()
            .max((t_vec.cross(&n_vec) - b_vec).amax());
        if dev > 1e-12 {
            return Err(Error::NonOrthonormalFrame(dev));
        }
        Ok(frame)
    }

    /// Frame of a space curve from its first two derivatives `c'`, `c''`.
    pub fn from_curve_derivatives(d1: Vector3<f64>, d2: Vector3<f64>) -> Result<Self> {
        let speed = d1.norm();
        if !(speed > 0.0) {
            return Err(Error::InvalidArgument("curve velocity vanishes".into()));
        }
        let t_vec = d1 / speed;
        let perp = d2 - t_vec * d2.dot(&t_vec);
        let pn = perp.norm();
        if !(pn > 1e-14 * d2.norm().max(1.0)) {
            return Err(Error::InvalidArgument(
                "curve is straight here; normal undefined".into(),
            ));
        }
        let n_vec = perp / pn;
        let b_vec = t_vec.cross(&n_vec);
        Self::new(t_vec, n_vec, b_vec)
    }

    pub fn gram_deviation(&self) -> f64 {
        let v = [self.t_vec, self.n_vec, self.b_vec];
        let mut dev = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((v[i].dot(&v[j]) - target).abs());
            }
        }
        dev
    }

    /// Radial unit vector `cos θ n + sin θ b` of the tube cross-section.
    pub fn radial(&self, theta: f64) -> Vector3<f64> {
        self.n_vec * theta.cos() + self.b_vec * theta.sin()
    }

    /// Azimuthal unit vector `−sin θ n + cos θ b`.
    pub fn azimuthal(&self, theta: f64) -> Vector3<f64> {
        -self.n_vec * theta.sin() + self.b_vec * theta.cos()
    }
}

/// Frenet curvature and torsion from `c'`, `c''`, `c'''`.
pub fn curve_curvature_torsion(d1: Vector3<f64>, d2: Vector3<f64>, d3: Vector3<f64>) -> (f64, f64) {
    let cross = d1.cross(&d2);
    let speed = d1.norm();
    let kappa = cross.norm() / (speed * speed * speed);
    let c2 = cross.norm_squared();
    let tau = if c2 > 0.0 { cross.dot(&d3) / c2 } else { 0.0 };
    (kappa, tau)
}
