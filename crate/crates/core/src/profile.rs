//! One-dimensional parameter profiles (curvature, torsion, velocity) and the
//! quadrature used to integrate them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Natural cubic spline through tabulated samples. Outside the table the end
/// cubic is extended.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        if samples
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::NonFinite("profile table"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument(
                "profile table abscissae must be strictly increasing".into(),
            ));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for interior second derivatives (Thomas algorithm).
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Ok(Self { xs, ys, m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            j if j >= n => n - 2,
            j => j - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A scalar profile along one coordinate.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    Table(CubicSpline),
    Function(Arc<ProfileFn>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Profile::Table(s) => f.debug_tuple("Table").field(&s.xs.len()).finish(),
            Profile::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl From<f64> for Profile {
    fn from(c: f64) -> Self {
        Profile::Constant(c)
    }
}

impl Profile {
    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Profile::Function(Arc::new(f))
    }

    pub fn table(samples: &[(f64, f64)]) -> Result<Self> {
        CubicSpline::new(samples).map(Profile::Table)
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Table(s) => s.eval(x),
            Profile::Function(f) => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Constant(c) if *c == 0.0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Profile::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// `∫_a^b profile`, exact for constants, adaptive Simpson otherwise.
    pub fn integral(&self, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
        match self {
            Profile::Constant(c) => Ok(c * (b - a)),
            _ => adaptive_simpson(|x| self.at(x), a, b, rel_tol),
        }
    }
}

const SIMPSON_MAX_DEPTH: u32 = 48;

/// Adaptive composite Simpson quadrature with a relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(Error::NonFinite("integrand"));
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Absolute target from a coarse magnitude estimate.
    let scale =
        ((b - a).abs() / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs())).max(f64::MIN_POSITIVE);
    simpson_step(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        rel_tol * scale,
        SIMPSON_MAX_DEPTH,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::NonFinite("integrand"));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?,
    )
}
