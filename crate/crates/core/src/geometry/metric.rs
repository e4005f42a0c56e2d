use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A point in a 2- or 3-dimensional coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    coords: [f64; 3],
    dim: usize,
}

impl ChartPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!(
                "chart dimension must be 2 or 3, got {dim}"
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("chart point"));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Self { coords: c, dim })
    }

    pub fn new2(x1: f64, x2: f64) -> Self {
        Self {
            coords: [x1, x2, 0.0],
            dim: 2,
        }
    }

    pub fn new3(x1: f64, x2: f64, x3: f64) -> Self {
        Self {
            coords: [x1, x2, x3],
            dim: 3,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords()[i]
    }

    /// Copy with coordinate `i` shifted by `h`.
    pub fn shifted(&self, i: usize, h: f64) -> Self {
        let mut out = *self;
        out.coords[i] += h;
        out
    }
}

type MetricEval = dyn Fn(&ChartPoint, f64) -> DMatrix<f64> + Send + Sync;
type MetricPartial = dyn Fn(&ChartPoint, f64, usize) -> DMatrix<f64> + Send + Sync;
type Domain = dyn Fn(&ChartPoint) -> bool + Send + Sync;

/// A Riemannian metric field `g_ij(x, t)` on a single coordinate chart.
///
/// Cheap to clone; the closures are shared.
#[derive(Clone)]
pub struct MetricSpec {
    dim: usize,
    eval: Arc<MetricEval>,
    domain: Arc<Domain>,
    partials: Option<Arc<MetricPartial>>,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec")
            .field("dim", &self.dim)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl MetricSpec {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&ChartPoint, f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        assert!((2..=3).contains(&dim), "metric dimension must be 2 or 3");
        Self {
            dim,
            eval: Arc::new(eval),
            domain: Arc::new(|_| true),
            partials: None,
        }
    }

    pub fn with_domain<D>(mut self, domain: D) -> Self
    where
        D: Fn(&ChartPoint) -> bool + Send + Sync + 'static,
    {
        self.domain = Arc::new(domain);
        self
    }

    /// Supply `d g / d x^i` in closed form; curvature then needs only one numeric
    /// differentiation instead of two.
    pub fn with_partials<P>(mut self, partials: P) -> Self
    where
        P: Fn(&ChartPoint, f64, usize) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(partials));
        self
    }

    /// The same metric with analytic partials dropped (pure finite differences).
    pub fn without_partials(&self) -> Self {
        Self {
            partials: None,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn contains(&self, p: &ChartPoint) -> bool {
        p.dim() == self.dim && (self.domain)(p)
    }

    /// Raw evaluation; callers check the domain.
    pub fn eval(&self, p: &ChartPoint, t: f64) -> DMatrix<f64> {
        (self.eval)(p, t)
    }

    pub(crate) fn partial(&self, p: &ChartPoint, t: f64, i: usize) -> Option<DMatrix<f64>> {
        self.partials.as_ref().map(|d| d(p, t, i))
    }

    pub(crate) fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if !(self.domain)(p) {
            return Err(Error::OutsideDomain(p.coords().to_vec()));
        }
        Ok(())
    }

    /// Euclidean identity metric.
    pub fn flat(dim: usize) -> Self {
        Self::new(dim, move |_, _| DMatrix::identity(dim, dim))
            .with_partials(move |_, _, _| DMatrix::zeros(dim, dim))
    }

    /// Round sphere of radius `a` in colatitude/longitude: `diag(a^2, a^2 sin^2 x1)`.
    pub fn round_sphere(a: f64) -> Self {
        let a2 = a * a;
        Self::new(2, move |p, _| {
            let s = p.coord(0).sin();
            DMatrix::from_row_slice(2, 2, &[a2, 0.0, 0.0, a2 * s * s])
        })
        .with_domain(|p| p.coord(0).sin().abs() > 1e-8)
        .with_partials(move |p, _, i| {
            let x = p.coord(0);
            let d = if i == 0 { a2 * (2.0 * x).sin() } else { 0.0 };
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, d])
        })
    }

    /// Plane in polar coordinates `(r, theta)`: `diag(1, r^2)`.
    pub fn polar() -> Self {
        Self::new(2, |p, _| {
            let r = p.coord(0);
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, r * r])
        })
        .with_domain(|p| p.coord(0) > 0.0)
    }
}

/// A tangent vector in the coordinate basis at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub components: Vec<f64>,
    pub base: ChartPoint,
}

impl TangentVector {
    pub fn new(base: ChartPoint, components: &[f64]) -> Result<Self> {
        if components.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: components.len(),
            });
        }
        Ok(Self {
            components: components.to_vec(),
            base,
        })
    }

    /// Coordinate basis vector `d/dx^i`.
    pub fn basis(base: ChartPoint, i: usize) -> Self {
        let mut components = vec![0.0; base.dim()];
        components[i] = 1.0;
        Self { components, base }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            components: self.components.iter().map(|x| a * x).collect(),
            base: self.base,
        }
    }

    /// `a * self + b * other`, both at the same base point.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self {
            components,
            base: self.base,
        }
    }
}

type FieldEval = dyn Fn(&ChartPoint) -> Vec<f64> + Send + Sync;

/// A vector field given by its coordinate components.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    eval: Arc<FieldEval>,
    domain: Arc<Domain>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .finish()
    }
}

impl VectorField {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&ChartPoint) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            eval: Arc::new(eval),
            domain: Arc::new(|_| true),
        }
    }

    pub fn with_domain<D>(mut self, domain: D) -> Self
    where
        D: Fn(&ChartPoint) -> bool + Send + Sync + 'static,
    {
        self.domain = Arc::new(domain);
        self
    }

    pub fn constant(components: Vec<f64>) -> Self {
        let dim = components.len();
        Self::new(dim, move |_| components.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        if !(self.domain)(p) {
            return Err(Error::StencilOutOfDomain(p.coords().to_vec()));
        }
        let v = (self.eval)(p);
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(v)
    }
}
