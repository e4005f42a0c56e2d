//! Pointwise Ricci flow `∂g/∂t = −2 Ric(g)`, the generalized Ricci eigenproblem
//! and the tube eigen-matrix / Lyapunov spectrum.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flux_tube::FlowField;
use crate::geometry::{ChartPoint, Kernel, MetricSpec};
use crate::linalg::{check_metric, generalized_eigen};
use crate::tolerances::Tolerances;

/// Metric at a fixed chart point at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub metric: DMatrix<f64>,
}

/// Solutions of `R χ = λ g χ`, ascending, with `g`-orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct RicciEigenSpectrum {
    pub lambdas: Vec<f64>,
    /// Column `i` pairs with `lambdas[i]`.
    pub eigvecs: DMatrix<f64>,
}

impl RicciEigenSpectrum {
    /// Largest `|R χ − λ g χ|` over all pairs.
    pub fn residual(&self, ricci: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
        self.lambdas
            .iter()
            .enumerate()
            .map(|(i, lam)| {
                let chi = self.eigvecs.column(i);
                (ricci * chi - *lam * (g * chi)).amax()
            })
            .fold(0.0, f64::max)
    }
}

pub fn ricci_eigenproblem(
    ricci: &DMatrix<f64>,
    g: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<RicciEigenSpectrum> {
    let e = generalized_eigen(ricci, g, tol)?;
    Ok(RicciEigenSpectrum {
        lambdas: e.values,
        eigvecs: e.vectors,
    })
}

/// Supplies `Ric` for a metric value during the pointwise flow.
pub trait RicciSource {
    fn ricci(&self, g: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>>;
}

/// Ricci tensor of a metric family at one chart point, with the evolved metric
/// value substituted in.
///
/// The spatial profile of the family is frozen: the field used at time `t` is
/// the congruence `A g0(x) A^T` with `A = L_t L_0^-1` (Cholesky factors of the
/// evolved and initial metric at the point), so it agrees with the evolved
/// matrix at the point and keeps the original shape around it. For conformal
/// evolution (`g = c g0`) this is exact.
#[derive(Debug, Clone)]
pub struct FrozenFormRicci {
    spec: MetricSpec,
    point: ChartPoint,
    t0: f64,
    l0_inv: DMatrix<f64>,
    kernel: Kernel,
}

impl FrozenFormRicci {
    pub fn new(spec: MetricSpec, point: ChartPoint, t0: f64, kernel: Kernel) -> Result<Self> {
        spec.check_point(&point)?;
        let g0 = spec.eval(&point, t0);
        check_metric(&g0, &kernel.tol)?;
        let l0 = g0
            .cholesky()
            .ok_or(Error::DegenerateMetric {
                min_eig: 0.0,
                max_eig: 0.0,
            })?
            .l();
        let l0_inv = l0.try_inverse().ok_or(Error::DegenerateMetric {
            min_eig: 0.0,
            max_eig: 0.0,
        })?;
        Ok(Self {
            spec,
            point,
            t0,
            l0_inv,
            kernel,
        })
    }

    pub fn initial_state(&self) -> FlowState {
        FlowState {
            t: self.t0,
            metric: self.spec.eval(&self.point, self.t0),
        }
    }
}

impl RicciSource for FrozenFormRicci {
    fn ricci(&self, g: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
        let lt = g.clone().cholesky().ok_or(Error::PositivityLoss { t })?.l();
        let a = lt * &self.l0_inv;
        let base = self.spec.clone();
        let t0 = self.t0;
        let evolved = MetricSpec::new(base.dim(), move |p, _| {
            let g0 = base.eval(p, t0);
            &a * g0 * a.transpose()
        });
        let domain_spec = self.spec.clone();
        let evolved = evolved.with_domain(move |p| domain_spec.contains(p));
        Ok(self
            .kernel
            .curvature_bundle(&evolved, &self.point, t0)?
            .ricci)
    }
}

/// `Ric = diag(λ_i) g` entrywise on a diagonal metric: the flow of decoupled
/// directions with constant Ricci eigenvalues.
#[derive(Debug, Clone)]
pub struct DiagonalRicci {
    pub lambdas: Vec<f64>,
}

impl RicciSource for DiagonalRicci {
    fn ricci(&self, g: &DMatrix<f64>, _t: f64) -> Result<DMatrix<f64>> {
        let n = g.nrows();
        if self.lambdas.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.lambdas.len(),
            });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.lambdas[i] * g[(i, i)]
            } else {
                0.0
            }
        }))
    }
}

fn ensure_positive(g: &DMatrix<f64>, t: f64, tol: &Tolerances) -> Result<()> {
    check_metric(g, tol).map_err(|_| Error::PositivityLoss { t })
}

/// One classical RK4 step of `dg/dt = −2 Ric(g)`.
pub fn rk4_step<S: RicciSource + ?Sized>(
    source: &S,
    state: &FlowState,
    dt: f64,
    tol: &Tolerances,
) -> Result<FlowState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    ensure_positive(&state.metric, state.t, tol)?;
    let rhs = |g: &DMatrix<f64>, t: f64| -> Result<DMatrix<f64>> {
        ensure_positive(g, t, tol)?;
        Ok(source.ricci(g, t)? * -2.0)
    };
    let g = &state.metric;
    let t = state.t;
    let k1 = rhs(g, t)?;
    let k2 = rhs(&(g + &k1 * (0.5 * dt)), t + 0.5 * dt)?;
    let k3 = rhs(&(g + &k2 * (0.5 * dt)), t + 0.5 * dt)?;
    let k4 = rhs(&(g + &k3 * dt), t + dt)?;
    let next = g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let next = (&next + next.transpose()) * 0.5;
    ensure_positive(&next, t + dt, tol)?;
    Ok(FlowState {
        t: t + dt,
        metric: next,
    })
}

/// RK4 step of the pointwise flow of `spec` at `p`. The spatial profile is
/// taken from `spec` at time `state.t` and frozen for the step.
pub fn ricci_flow_step(
    kernel: &Kernel,
    spec: &MetricSpec,
    state: &FlowState,
    dt: f64,
    p: &ChartPoint,
) -> Result<FlowState> {
    let source = FrozenFormRicci::new(spec.clone(), *p, state.t, *kernel)?;
    rk4_step(&source, state, dt, &kernel.tol)
}

/// Integrates from `state` to `t_end` with steps of `dt` (the last step is
/// shortened to land on `t_end`). Returns every state including the first.
pub fn integrate<S: RicciSource + ?Sized>(
    source: &S,
    state: FlowState,
    dt: f64,
    t_end: f64,
    tol: &Tolerances,
) -> Result<Vec<FlowState>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let span = t_end - state.t;
    if span < 0.0 {
        return Err(Error::InvalidArgument(
            "t_end precedes the initial time".into(),
        ));
    }
    let steps = (span / dt - 1e-9).ceil().max(0.0) as usize;
    let t0 = state.t;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state);
    for i in 0..steps {
        let cur = out.last().expect("non-empty trajectory");
        let target = if i + 1 == steps {
            t_end
        } else {
            t0 + (i + 1) as f64 * dt
        };
        let mut next = rk4_step(source, cur, target - cur.t, tol)?;
        next.t = target;
        out.push(next);
    }
    Ok(out)
}

/// `diag(exp(−2 λ_i t))`, no summation over `i`.
pub fn closed_form_diagonal(lambdas: &[f64], t: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        lambdas.len(),
        lambdas.iter().map(|l| (-2.0 * l * t).exp()),
    ))
}

/// Diagonal flow `g(t) = diag(exp(−2 λ_i t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFlowSolution {
    pub lambdas: Vec<f64>,
}

impl DiagonalFlowSolution {
    pub fn at(&self, t: f64) -> DMatrix<f64> {
        closed_form_diagonal(&self.lambdas, t)
    }

    /// Largest `|∂_t g_ii + 2 λ_i g_ii|`, with the exact time derivative.
    pub fn ode_residual(&self, t: f64) -> f64 {
        self.lambdas
            .iter()
            .map(|l| {
                let g = (-2.0 * l * t).exp();
                let dg = -2.0 * l * g;
                (dg + 2.0 * l * g).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Recovers `λ_i = −(∂_t g_ii) / (2 g_ii)` from time-sampled diagonal metrics
/// by central differences at the middle sample.
///
/// With five or more equally spaced samples the three-point estimate is
/// Richardson-refined with the doubled stencil.
pub fn flow_eigenrate(series: &[(f64, DMatrix<f64>)]) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: series.len(),
        });
    }
    let n = series[0].1.nrows();
    for (idx, (_, g)) in series.iter().enumerate() {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && g[(i, j)] != 0.0 {
                    return Err(Error::NonDiagonal(idx));
                }
            }
            if !(g[(i, i)] > 0.0) {
                return Err(Error::NonPositive("diagonal metric entry"));
            }
        }
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument(
            "sample times must be strictly increasing".into(),
        ));
    }

    let mid = series.len() / 2;
    let (t0, g0) = (&series[mid].0, &series[mid].1);
    let three_point = |lo: usize, hi: usize, i: usize| -> f64 {
        let (ta, ga) = (series[lo].0, series[lo].1[(i, i)]);
        let (tb, gb) = (series[hi].0, series[hi].1[(i, i)]);
        // Non-uniform three-point derivative at t0.
        let ha = t0 - ta;
        let hb = tb - t0;
        let gm = g0[(i, i)];
        (-hb / (ha * (ha + hb))) * ga + ((hb - ha) / (ha * hb)) * gm + (ha / (hb * (ha + hb))) * gb
    };
    let uniform = {
        let h = series[1].0 - series[0].0;
        series
            .windows(2)
            .all(|w| ((w[1].0 - w[0].0) - h).abs() <= 1e-9 * h.abs())
    };
    let refine = uniform && mid >= 2 && mid + 2 < series.len();
    Ok((0..n)
        .map(|i| {
            let d1 = three_point(mid - 1, mid + 1, i);
            let d = if refine {
                let d2 = three_point(mid - 2, mid + 2, i);
                (4.0 * d1 - d2) / 3.0
            } else {
                d1
            };
            -d / (2.0 * g0[(i, i)])
        })
        .collect())
}

/// The tube eigen-matrix, its determinant and its roots in `λ`.
#[derive(Debug, Clone)]
pub struct EigenMatrixReport {
    pub matrix: DMatrix<f64>,
    pub determinant: f64,
    /// Values of `λ` zeroing each diagonal factor, in diagonal order. The first
    /// factor is `2 λ g_11` (root `0`, or every `λ` when `g_11 = 0`); the other
    /// two are `∂_t g_ii + λ g_ii`. `None` marks a factor that vanishes for
    /// every `λ` or never.
    pub roots: [Option<f64>; 3],
}

/// `M = diag(2 λ g_11, ∂_t g_22 + λ g_22, ∂_t g_33 + λ g_33)`.
pub fn tube_eigen_matrix(
    g: &DMatrix<f64>,
    dtg: &DMatrix<f64>,
    lam: f64,
) -> Result<EigenMatrixReport> {
    for m in [g, dtg] {
        if m.nrows() != 3 || m.ncols() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: m.nrows(),
            });
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j && m[(i, j)] != 0.0 {
                    return Err(Error::NonDiagonal(0));
                }
            }
        }
    }
    let diag = [
        2.0 * lam * g[(0, 0)],
        dtg[(1, 1)] + lam * g[(1, 1)],
        dtg[(2, 2)] + lam * g[(2, 2)],
    ];
    let matrix = DMatrix::from_diagonal(&DVector::from_row_slice(&diag));
    let determinant = diag.iter().product();
    let first = if g[(0, 0)] != 0.0 { Some(0.0) } else { None };
    let root = |i: usize| {
        if g[(i, i)] != 0.0 {
            Some(-dtg[(i, i)] / g[(i, i)])
        } else {
            None
        }
    };
    Ok(EigenMatrixReport {
        matrix,
        determinant,
        roots: [first, root(1), root(2)],
    })
}

/// Thick-tube Lyapunov spectrum `(0, 2 v_r/r, v_r/r + ω1 tan θ)`.
pub fn tube_lyapunov_spectrum(
    flow: &FlowField,
    r: f64,
    theta: f64,
    tol: &Tolerances,
) -> Result<[f64; 3]> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let tan = checked_tan(theta, tol)?;
    let lambda2 = 2.0 * flow.v_r.at(r) / r;
    Ok([0.0, lambda2, 0.5 * lambda2 + flow.omega1 * tan])
}

pub(crate) fn checked_tan(theta: f64, tol: &Tolerances) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    if theta.cos().abs() < tol.tangent_cos_min {
        return Err(Error::TangentSingularity(theta));
    }
    Ok(theta.tan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn eigenproblem_examples() {
        let tol = Tolerances::default();
        let zero =
            ricci_eigenproblem(&DMatrix::zeros(3, 3), &DMatrix::identity(3, 3), &tol).unwrap();
        assert!(zero.lambdas.iter().all(|l| *l == 0.0));

        let d =
            ricci_eigenproblem(&diag(&[1.0, 2.0, 3.0]), &DMatrix::identity(3, 3), &tol).unwrap();
        assert_eq!(d.lambdas, vec![1.0, 2.0, 3.0]);

        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.8]);
        let e = ricci_eigenproblem(&(&g * -0.7), &g, &tol).unwrap();
        assert!(e.lambdas.iter().all(|l| (l + 0.7).abs() < 1e-12));
    }

    #[test]
    fn eigenproblem_rejects_degenerate_metric() {
        let g = diag(&[1.0, 0.0, 1.0]);
        assert!(matches!(
            ricci_eigenproblem(&DMatrix::identity(3, 3), &g, &Tolerances::default()),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn flat_flow_is_stationary() {
        let kernel = Kernel::default();
        let spec = MetricSpec::flat(3);
        let p = ChartPoint::new3(0.1, 0.2, 0.3);
        let state = FlowState {
            t: 0.0,
            metric: DMatrix::identity(3, 3),
        };
        let next = ricci_flow_step(&kernel, &spec, &state, 0.01, &p).unwrap();
        assert!((next.metric - DMatrix::<f64>::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn step_requires_positive_dt() {
        let source = DiagonalRicci {
            lambdas: vec![1.0, 1.0],
        };
        let s = FlowState {
            t: 0.0,
            metric: DMatrix::identity(2, 2),
        };
        assert!(rk4_step(&source, &s, 0.0, &Tolerances::default()).is_err());
    }

    #[test]
    fn positivity_loss_is_reported() {
        // g = 1 − 2t hits zero at t = 0.5.
        struct Unit;
        impl RicciSource for Unit {
            fn ricci(&self, g: &DMatrix<f64>, _: f64) -> Result<DMatrix<f64>> {
                Ok(DMatrix::identity(g.nrows(), g.nrows()))
            }
        }
        let s = FlowState {
            t: 0.0,
            metric: DMatrix::identity(2, 2),
        };
        let err = integrate(&Unit, s, 0.1, 1.0, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::PositivityLoss { .. }));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form_diagonal(&[0.3, -2.0, 5.0], 0.0),
            DMatrix::identity(3, 3)
        );
        let g = closed_form_diagonal(&[1.0, 0.0, -1.0], 1.0);
        let e = std::f64::consts::E;
        assert!((g[(0, 0)] - e.powi(-2)).abs() < 1e-16);
        assert_eq!(g[(1, 1)], 1.0);
        assert!((g[(2, 2)] - e * e).abs() < 1e-14);
        let sol = DiagonalFlowSolution {
            lambdas: vec![1.0, 0.5, -0.25],
        };
        for i in 0..20 {
            assert!(sol.ode_residual(i as f64 * 0.37) < 1e-10);
        }
    }

    #[test]
    fn eigenrate_examples() {
        let constant: Vec<_> = (0..3)
            .map(|i| (i as f64 * 0.1, diag(&[2.0, 3.0])))
            .collect();
        assert_eq!(flow_eigenrate(&constant).unwrap(), vec![0.0, 0.0]);

        let dt = 1e-3;
        let series: Vec<_> = (0..3)
            .map(|i| (i as f64 * dt, diag(&[(-2.0 * 0.7 * i as f64 * dt).exp()])))
            .collect();
        assert!((flow_eigenrate(&series).unwrap()[0] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn eigenrate_errors() {
        let two: Vec<_> = (0..2).map(|i| (i as f64, diag(&[1.0]))).collect();
        assert!(matches!(
            flow_eigenrate(&two),
            Err(Error::InsufficientSamples { .. })
        ));
        let off = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 1.0]);
        let bad: Vec<_> = (0..3).map(|i| (i as f64, off.clone())).collect();
        assert!(matches!(flow_eigenrate(&bad), Err(Error::NonDiagonal(0))));
        let neg: Vec<_> = (0..3).map(|i| (i as f64, diag(&[-1.0]))).collect();
        assert!(matches!(flow_eigenrate(&neg), Err(Error::NonPositive(_))));
    }

    #[test]
    fn eigen_matrix_examples() {
        let r = tube_eigen_matrix(&DMatrix::identity(3, 3), &DMatrix::zeros(3, 3), 0.4).unwrap();
        assert_eq!(r.roots, [Some(0.0), Some(-0.0), Some(-0.0)]);

        let r = tube_eigen_matrix(&diag(&[1.0, 4.0, 9.0]), &diag(&[0.0, -8.0, 18.0]), 1.0).unwrap();
        assert_eq!(r.roots, [Some(0.0), Some(2.0), Some(-2.0)]);
        assert_eq!(r.determinant, 2.0 * (-8.0 + 4.0) * (18.0 + 9.0));

        for lam in [2.0, -2.0] {
            let r =
                tube_eigen_matrix(&diag(&[1.0, 4.0, 9.0]), &diag(&[0.0, -8.0, 18.0]), lam).unwrap();
            assert_eq!(r.determinant, 0.0);
        }
        let r = tube_eigen_matrix(&diag(&[3.0, 1.0, 2.0]), &diag(&[5.0, 1.0, 1.0]), 0.0).unwrap();
        assert_eq!(r.determinant, 0.0);
        assert_eq!(r.matrix[(0, 0)], 0.0);
    }

    #[test]
    fn lyapunov_spectrum_examples() {
        let tol = Tolerances::default();
        assert_eq!(
            tube_lyapunov_spectrum(&FlowField::default(), 1.0, 0.3, &tol).unwrap(),
            [0.0, 0.0, 0.0]
        );

        let flow = FlowField::uniform(-0.1, 0.0, 0.0, 1.0);
        let s = tube_lyapunov_spectrum(&flow, 1.0, FRAC_PI_4, &tol).unwrap();
        assert_eq!(s[0], 0.0);
        assert!((s[1] + 0.2).abs() < 1e-15);
        assert!((s[2] - 0.9).abs() < 1e-15);

        let s = tube_lyapunov_spectrum(&flow, 0.5, 0.0, &tol).unwrap();
        assert_eq!(s[2], 0.5 * s[1]);

        assert!(matches!(
            tube_lyapunov_spectrum(&flow, 1.0, FRAC_PI_2, &tol),
            Err(Error::TangentSingularity(_))
        ));
        assert!(tube_lyapunov_spectrum(&flow, 0.0, 0.1, &tol).is_err());
    }
}
