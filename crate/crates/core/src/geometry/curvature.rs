use nalgebra::DMatrix;

use super::jet::MetricJet;
use super::metric::{ChartPoint, MetricSpec, TangentVector, VectorField};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

type Rank3 = [[[f64; 3]; 3]; 3];
type Rank4 = [[[[f64; 3]; 3]; 3]; 3];

/// Levi-Civita connection coefficients `gamma[k][i][j] = Γ^k_ij` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelSymbols {
    dim: usize,
    gamma: Rank3,
}

impl ChristoffelSymbols {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][i][j]
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0_f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    m = m.max(self.gamma[k][i][j].abs());
                }
            }
        }
        m
    }
}

/// Curvature quantities at one point.
///
/// Index order follows `R(X,Y)Z = R^l_jkp Z^j X^k Y^p d_l`; the lowered tensor is
/// `R_ljkp = g_la R^a_jkp`, Ricci is `R_jp = R^k_jkp`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle {
    dim: usize,
    riemann_up: Rank4,
    riemann_down: Rank4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// Metric at the evaluation point, kept for inner products.
    pub metric: DMatrix<f64>,
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R^l_jkp`.
    pub fn riemann_up(&self, l: usize, j: usize, k: usize, p: usize) -> f64 {
        self.riemann_up[l][j][k][p]
    }

    /// `R_ljkp`.
    pub fn riemann_down(&self, l: usize, j: usize, k: usize, p: usize) -> f64 {
        self.riemann_down[l][j][k][p]
    }

    /// Largest `|R_ljkp|`.
    pub fn max_abs_down(&self) -> f64 {
        self.fold_down(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|R^l_jkp|`.
    pub fn max_abs_up(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0_f64;
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for p in 0..n {
                        m = m.max(self.riemann_up[l][j][k][p].abs());
                    }
                }
            }
        }
        m
    }

    fn fold_down(&self, init: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.dim;
        let mut acc = init;
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for p in 0..n {
                        acc = f(acc, self.riemann_down[l][j][k][p]);
                    }
                }
            }
        }
        acc
    }
}

/// Numeric tensor-calculus kernel. All operations are pure; the kernel only
/// carries tolerances.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kernel {
    pub tol: Tolerances,
}

fn christoffel_from_jet(jet: &MetricJet) -> (Rank3, Rank3) {
    let n = jet.dim;
    // First kind: first[m][i][j] = Γ_m,ij
    let mut first = [[[0.0; 3]; 3]; 3];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                first[m][i][j] = 0.5 * (jet.dg[i][(m, j)] + jet.dg[j][(m, i)] - jet.dg[m][(i, j)]);
            }
        }
    }
    let mut second = [[[0.0; 3]; 3]; 3];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                second[k][i][j] = (0..n).map(|m| jet.g_inv[(k, m)] * first[m][i][j]).sum();
            }
        }
    }
    (first, second)
}

impl Kernel {
    pub fn new(tol: Tolerances) -> Self {
        Self { tol }
    }

    /// `Γ^k_ij = ½ g^kl (d_i g_lj + d_j g_li − d_l g_ij)`.
    pub fn christoffel(
        &self,
        spec: &MetricSpec,
        p: &ChartPoint,
        t: f64,
    ) -> Result<ChristoffelSymbols> {
        let jet = MetricJet::at(spec, p, t, false, &self.tol)?;
        let (_, gamma) = christoffel_from_jet(&jet);
        Ok(ChristoffelSymbols {
            dim: jet.dim,
            gamma,
        })
    }

    pub fn curvature_bundle(
        &self,
        spec: &MetricSpec,
        p: &ChartPoint,
        t: f64,
    ) -> Result<CurvatureBundle> {
        let jet = MetricJet::at(spec, p, t, true, &self.tol)?;
        Ok(bundle_from_jet(&jet))
    }

    /// `<R(X,Y)Y, X> / (|X|^2 |Y|^2 − <X,Y>^2)`.
    pub fn sectional_curvature(
        &self,
        spec: &MetricSpec,
        p: &ChartPoint,
        x: &TangentVector,
        y: &TangentVector,
        t: f64,
    ) -> Result<f64> {
        let n = spec.dim();
        for v in [x, y] {
            if v.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.dim(),
                });
            }
        }
        let bundle = self.curvature_bundle(spec, p, t)?;
        sectional_from_bundle(&bundle, &x.components, &y.components, &self.tol)
    }

    /// `R_1212 / det g` on a 2-dimensional chart.
    pub fn gauss_curvature_2d(&self, spec: &MetricSpec, p: &ChartPoint, t: f64) -> Result<f64> {
        if spec.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: spec.dim(),
            });
        }
        let bundle = self.curvature_bundle(spec, p, t)?;
        let det = bundle.metric.determinant();
        if det < self.tol.min_determinant {
            return Err(Error::DegenerateMetric {
                min_eig: 0.0,
                max_eig: 0.0,
            });
        }
        Ok(bundle.riemann_down(0, 1, 0, 1) / det)
    }

    /// Lie bracket `[X,Y]^k = X^j d_j Y^k − Y^j d_j X^k`.
    pub fn commutator(
        &self,
        xf: &VectorField,
        yf: &VectorField,
        p: &ChartPoint,
    ) -> Result<TangentVector> {
        let n = p.dim();
        for f in [xf, yf] {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.dim(),
                });
            }
        }
        let xv = xf.eval(p)?;
        let yv = yf.eval(p)?;
        let dx = self.field_jacobian(xf, p)?;
        let dy = self.field_jacobian(yf, p)?;
        let comps: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|j| xv[j] * dy[j][k] - yv[j] * dx[j][k]).sum())
            .collect();
        TangentVector::new(*p, &comps)
    }

    /// `(∇_X Y)^k = X^j d_j Y^k + Γ^k_jm X^j Y^m`.
    pub fn covariant_derivative(
        &self,
        x: &TangentVector,
        yf: &VectorField,
        p: &ChartPoint,
        spec: &MetricSpec,
        t: f64,
    ) -> Result<TangentVector> {
        let n = spec.dim();
        if x.dim() != n || yf.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.dim().min(yf.dim()),
            });
        }
        let gamma = self.christoffel(spec, p, t)?;
        let yv = yf.eval(p)?;
        let dy = self.field_jacobian(yf, p)?;
        let xc = &x.components;
        let comps: Vec<f64> = (0..n)
            .map(|k| {
                let directional: f64 = (0..n).map(|j| xc[j] * dy[j][k]).sum();
                let connection: f64 = (0..n)
                    .flat_map(|j| (0..n).map(move |m| (j, m)))
                    .map(|(j, m)| gamma.get(k, j, m) * xc[j] * yv[m])
                    .sum();
                directional + connection
            })
            .collect();
        TangentVector::new(*p, &comps)
    }

    /// `jac[j][k] = d_j F^k` by central differences.
    fn field_jacobian(&self, f: &VectorField, p: &ChartPoint) -> Result<Vec<Vec<f64>>> {
        let n = p.dim();
        (0..n)
            .map(|j| {
                let h = self.tol.first_step_at(p.coord(j));
                let plus = f.eval(&p.shifted(j, h))?;
                let minus = f.eval(&p.shifted(j, -h))?;
                Ok(plus
                    .iter()
                    .zip(&minus)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect())
            })
            .collect()
    }
}

fn bundle_from_jet(jet: &MetricJet) -> CurvatureBundle {
    let n = jet.dim;
    let (first, gamma) = christoffel_from_jet(jet);

    // d_a g^km = −g^kb (d_a g_bc) g^cm
    let dginv: Vec<DMatrix<f64>> = (0..n)
        .map(|a| -(&jet.g_inv * &jet.dg[a] * &jet.g_inv))
        .collect();

    // dgamma[a][k][i][j] = d_a Γ^k_ij
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        let dfirst = 0.5
                            * (jet.ddg[a][i][(m, j)] + jet.ddg[a][j][(m, i)]
                                - jet.ddg[a][m][(i, j)]);
                        acc += dginv[a][(k, m)] * first[m][i][j] + jet.g_inv[(k, m)] * dfirst;
                    }
                    dgamma[a][k][i][j] = acc;
                }
            }
        }
    }

    // R^l_jkp = d_k Γ^l_pj − d_p Γ^l_kj + Γ^l_km Γ^m_pj − Γ^l_pm Γ^m_kj
    let mut up = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                for p in 0..n {
                    let mut v = dgamma[k][l][p][j] - dgamma[p][l][k][j];
                    for m in 0..n {
                        v += gamma[l][k][m] * gamma[m][p][j] - gamma[l][p][m] * gamma[m][k][j];
                    }
                    up[l][j][k][p] = v;
                }
            }
        }
    }

    let mut down = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                for p in 0..n {
                    down[l][j][k][p] = (0..n).map(|a| jet.g[(l, a)] * up[a][j][k][p]).sum();
                }
            }
        }
    }

    let mut ricci = DMatrix::zeros(n, n);
    for j in 0..n {
        for p in 0..n {
            ricci[(j, p)] = (0..n).map(|k| up[k][j][k][p]).sum();
        }
    }
    // Symmetric in exact arithmetic; drop the finite-difference asymmetry.
    let ricci = (&ricci + ricci.transpose()) * 0.5;
    let scalar = (0..n)
        .flat_map(|j| (0..n).map(move |p| (j, p)))
        .map(|(j, p)| jet.g_inv[(j, p)] * ricci[(j, p)])
        .sum();

    CurvatureBundle {
        dim: n,
        riemann_up: up,
        riemann_down: down,
        ricci,
        scalar,
        metric: jet.g.clone(),
    }
}

pub(crate) fn sectional_from_bundle(
    bundle: &CurvatureBundle,
    x: &[f64],
    y: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    let n = bundle.dim();
    let g = &bundle.metric;
    let inner = |u: &[f64], v: &[f64]| -> f64 {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| g[(i, j)] * u[i] * v[j])
            .sum()
    };
    let xx = inner(x, x);
    let yy = inner(y, y);
    let xy = inner(x, y);
    let area = xx * yy - xy * xy;
    if !(area > tol.min_plane_area * xx * yy) {
        return Err(Error::DegeneratePlane(area));
    }
    let mut num = 0.0;
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                for p in 0..n {
                    num += bundle.riemann_down(l, j, k, p) * x[l] * y[j] * x[k] * y[p];
                }
            }
        }
    }
    Ok(num / area)
}
