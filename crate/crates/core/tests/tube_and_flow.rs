use nalgebra::DMatrix;
use ricci_dynamo::dynamo::{chicone_latushkin_lambda, ideal_lambda};
use ricci_dynamo::flux_tube::{
    analytic_gauss, numeric_r1212_closed_form, tube_surface_metric, DetConvention, TubeMode,
    TubeParams,
};
use ricci_dynamo::geometry::{ChartPoint, Kernel, MetricSpec};
use ricci_dynamo::ricci_flow::{
    closed_form_diagonal, integrate, DiagonalRicci, FlowState, FrozenFormRicci,
};
use ricci_dynamo::Tolerances;

// Gauss curvature of diag(E, G(θ)) with constant E: −(√G)_θθ / (E √G).
fn surface_gauss_oracle(r0: f64, kappa: f64, theta: f64) -> f64 {
    let sqrt_g = 1.0 - r0 * kappa * theta.cos();
    let sqrt_g_tt = r0 * kappa * theta.cos();
    -sqrt_g_tt / (r0 * r0 * sqrt_g)
}

#[test]
fn thick_surface_curvature_matches_hand_oracle() {
    let k = Kernel::default();
    for (r0, kappa) in [(0.05, 0.5), (0.1, 2.0), (0.2, 1.0)] {
        let params = TubeParams::constant(kappa, 0.0, r0, TubeMode::Thick);
        let spec = tube_surface_metric(&params).unwrap();
        for theta in [0.0, 0.7, 1.9, 3.0, 4.4] {
            let p = ChartPoint::new2(theta, 0.3);
            let kg = k.gauss_curvature_2d(&spec, &p, 0.0).unwrap();
            let oracle = surface_gauss_oracle(r0, kappa, theta);
            assert!(
                (kg - oracle).abs() < 1e-6 * oracle.abs().max(1.0),
                "r0={r0} κ={kappa} θ={theta}"
            );
            let det = analytic_gauss(&params, 0.3, theta, DetConvention::Determinant).unwrap();
            assert!((det - oracle).abs() < 1e-12 * oracle.abs().max(1.0));
            let r1212 = k
                .curvature_bundle(&spec, &p, 0.0)
                .unwrap()
                .riemann_down(0, 1, 0, 1);
            let closed = numeric_r1212_closed_form(&params, 0.3, theta);
            assert!((r1212 - closed).abs() < 1e-6 * closed.abs().max(r0 * kappa * 1e-3));
        }
    }
}

#[test]
fn radius_and_determinant_conventions_differ_by_stretch_squared() {
    let params = TubeParams::constant(1.5, 0.0, 0.1, TubeMode::Thick);
    for theta in [0.2, 1.0, 2.5] {
        let a = analytic_gauss(&params, 0.0, theta, DetConvention::RadiusSquared).unwrap();
        let b = analytic_gauss(&params, 0.0, theta, DetConvention::Determinant).unwrap();
        let k = params.stretch(0.1, theta, 0.0);
        assert!((a - b * k * k).abs() < 1e-12);
    }
}

#[test]
fn thin_tube_gauss_curvature_example() {
    let params = TubeParams::default();
    let kg = analytic_gauss(&params, 0.0, 0.0, DetConvention::RadiusSquared).unwrap();
    assert_eq!(kg, -10.0);
}

#[test]
fn einstein_sphere_contracts_linearly() {
    let kernel = Kernel::default();
    let p = ChartPoint::new2(1.2, 0.0);
    let src = FrozenFormRicci::new(MetricSpec::round_sphere(1.0), p, 0.0, kernel).unwrap();
    let start = src.initial_state();
    let g0 = start.metric.clone();
    let traj = integrate(&src, start, 1e-2, 0.2, &kernel.tol).unwrap();
    assert_eq!(traj.len(), 21);
    for s in &traj {
        assert!((&s.metric - &g0 * (1.0 - 2.0 * s.t)).amax() < 1e-8);
    }
}

#[test]
fn rk4_is_fourth_order_on_exponential_flow() {
    let lambdas = vec![1.0, 0.5, -0.25];
    let src = DiagonalRicci {
        lambdas: lambdas.clone(),
    };
    let tol = Tolerances::default();
    let err = |dt: f64| {
        let start = FlowState {
            t: 0.0,
            metric: DMatrix::identity(3, 3),
        };
        let traj = integrate(&src, start, dt, 0.5, &tol).unwrap();
        let end = traj.last().unwrap();
        (&end.metric - closed_form_diagonal(&lambdas, end.t)).amax()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn cl_eigenvalue_limits() {
    assert_eq!(ideal_lambda(-4.0).re, 2.0);
    let l = chicone_latushkin_lambda(0.0, 4.0).unwrap();
    assert_eq!((l.re, l.im), (0.0, 2.0));
    let one = chicone_latushkin_lambda(1.0, -4.0).unwrap();
    assert!((one.re - 0.5 * (-17.0 + 241f64.sqrt())).abs() < 1e-12);
    assert_eq!(one.im, 0.0);
}
