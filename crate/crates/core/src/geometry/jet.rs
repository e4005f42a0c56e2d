//! Finite-difference jets of a metric field at a point.

use nalgebra::DMatrix;

use super::metric::{ChartPoint, MetricSpec};
use crate::error::{Error, Result};
use crate::linalg::check_metric;
use crate::tolerances::Tolerances;

/// `g`, `g^-1` and coordinate derivatives of `g` at one point.
#[derive(Debug, Clone)]
pub(crate) struct MetricJet {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[a] = d g / d x^a`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[a][b] = d^2 g / d x^a d x^b`; empty unless requested.
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

fn eval_checked(spec: &MetricSpec, p: &ChartPoint, t: f64) -> Result<DMatrix<f64>> {
    if !spec.contains(p) {
        return Err(Error::StencilOutOfDomain(p.coords().to_vec()));
    }
    let g = spec.eval(p, t);
    if g.nrows() != spec.dim() || g.ncols() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: g.nrows(),
        });
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("metric"));
    }
    Ok(g)
}

fn first_derivative(
    spec: &MetricSpec,
    p: &ChartPoint,
    t: f64,
    a: usize,
    h: f64,
) -> Result<DMatrix<f64>> {
    let plus = eval_checked(spec, &p.shifted(a, h), t)?;
    let minus = eval_checked(spec, &p.shifted(a, -h), t)?;
    Ok((plus - minus) / (2.0 * h))
}

#[allow(clippy::too_many_arguments)]
fn second_difference(
    spec: &MetricSpec,
    p: &ChartPoint,
    t: f64,
    g0: &DMatrix<f64>,
    a: usize,
    b: usize,
    ha: f64,
    hb: f64,
) -> Result<DMatrix<f64>> {
    if a == b {
        let plus = eval_checked(spec, &p.shifted(a, ha), t)?;
        let minus = eval_checked(spec, &p.shifted(a, -ha), t)?;
        Ok((plus - g0 * 2.0 + minus) / (ha * ha))
    } else {
        let pp = eval_checked(spec, &p.shifted(a, ha).shifted(b, hb), t)?;
        let pm = eval_checked(spec, &p.shifted(a, ha).shifted(b, -hb), t)?;
        let mp = eval_checked(spec, &p.shifted(a, -ha).shifted(b, hb), t)?;
        let mm = eval_checked(spec, &p.shifted(a, -ha).shifted(b, -hb), t)?;
        Ok((pp - pm - mp + mm) / (4.0 * ha * hb))
    }
}

impl MetricJet {
    /// Builds the jet; second derivatives only when `second` is set.
    pub fn at(
        spec: &MetricSpec,
        p: &ChartPoint,
        t: f64,
        second: bool,
        tol: &Tolerances,
    ) -> Result<Self> {
        spec.check_point(p)?;
        let n = spec.dim();
        let g = eval_checked(spec, p, t)?;
        check_metric(&g, tol)?;
        let g_inv = g.clone().try_inverse().ok_or(Error::DegenerateMetric {
            min_eig: 0.0,
            max_eig: 0.0,
        })?;

        let analytic = spec.has_partials();
        let mut dg = Vec::with_capacity(n);
        for a in 0..n {
            let d = match spec.partial(p, t, a) {
                Some(d) => d,
                None => first_derivative(spec, p, t, a, tol.first_step_at(p.coord(a)))?,
            };
            dg.push(d);
        }

        let mut ddg = Vec::new();
        if second {
            ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
            if analytic {
                // Differentiate the closed-form partials once more.
                for b in 0..n {
                    let h = tol.first_step_at(p.coord(b));
                    let pp = p.shifted(b, h);
                    let pm = p.shifted(b, -h);
                    for q in [&pp, &pm] {
                        if !spec.contains(q) {
                            return Err(Error::StencilOutOfDomain(q.coords().to_vec()));
                        }
                    }
                    for a in 0..n {
                        let plus = spec.partial(&pp, t, a).expect("analytic partials");
                        let minus = spec.partial(&pm, t, a).expect("analytic partials");
                        ddg[a][b] = (plus - minus) / (2.0 * h);
                    }
                }
                for a in 0..n {
                    for b in (a + 1)..n {
                        let avg = (&ddg[a][b] + &ddg[b][a]) * 0.5;
                        ddg[a][b] = avg.clone();
                        ddg[b][a] = avg;
                    }
                }
            } else {
                for a in 0..n {
                    for b in a..n {
                        let ha = tol.second_step_at(p.coord(a));
                        let hb = tol.second_step_at(p.coord(b));
                        let coarse = second_difference(spec, p, t, &g, a, b, ha, hb)?;
                        let fine = second_difference(spec, p, t, &g, a, b, 0.5 * ha, 0.5 * hb)?;
                        // One Richardson level: the O(h^2) error term cancels.
                        let d = (fine * 4.0 - coarse) / 3.0;
                        ddg[b][a] = d.clone();
                        ddg[a][b] = d;
                    }
                }
            }
        }

        Ok(Self {
            dim: n,
            g,
            g_inv,
            dg,
            ddg,
        })
    }
}
