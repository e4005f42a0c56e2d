use nalgebra::DMatrix;
use ricci_dynamo::flux_tube::{tube_metric_3d, TubeParams};
use ricci_dynamo::geometry::{ChartPoint, Kernel, MetricSpec, TangentVector, VectorField};

// Christoffel symbols of a diagonal metric, written out by hand:
// Γ^k_kk = d_k g_kk / 2g_kk, Γ^k_ki = d_i g_kk / 2g_kk, Γ^k_ii = −d_k g_ii / 2g_kk (i ≠ k).
fn diagonal_christoffel(g: &[f64], dg: &[Vec<f64>], k: usize, i: usize, j: usize) -> f64 {
    let gkk = g[k];
    if i == j && i == k {
        dg[k][k] / (2.0 * gkk)
    } else if i == k {
        dg[j][k] / (2.0 * gkk)
    } else if j == k {
        dg[i][k] / (2.0 * gkk)
    } else if i == j {
        -dg[k][i] / (2.0 * gkk)
    } else {
        0.0
    }
}

#[test]
fn polar_christoffel_matches_hand_formula() {
    let k = Kernel::default();
    for r in [0.5, 1.0, 2.0, 3.5] {
        let gamma = k
            .christoffel(&MetricSpec::polar(), &ChartPoint::new2(r, 0.3), 0.0)
            .unwrap();
        // dg[i][m] = d_i g_mm
        let g = [1.0, r * r];
        let dg = vec![vec![0.0, 2.0 * r], vec![0.0, 0.0]];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let want = diagonal_christoffel(&g, &dg, a, b, c);
                    assert!(
                        (gamma.get(a, b, c) - want).abs() < 1e-8,
                        "Γ^{a}_{b}{c} at r={r}"
                    );
                }
            }
        }
        assert!((gamma.get(0, 1, 1) + r).abs() < 1e-8);
        assert!((gamma.get(1, 0, 1) - 1.0 / r).abs() < 1e-8);
    }
}

#[test]
fn straight_tube_christoffel_is_cylindrical() {
    let params = TubeParams::constant(0.0, 0.0, 0.1, Default::default());
    let spec = tube_metric_3d(&params);
    let r = 0.7;
    let gamma = Kernel::default()
        .christoffel(&spec, &ChartPoint::new3(r, 1.1, 2.0), 0.0)
        .unwrap();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let want = match (a, b, c) {
                    (0, 1, 1) => -r,
                    (1, 0, 1) | (1, 1, 0) => 1.0 / r,
                    _ => 0.0,
                };
                assert!((gamma.get(a, b, c) - want).abs() < 1e-8, "Γ^{a}_{b}{c}");
            }
        }
    }
}

#[test]
fn sphere_riemann_component() {
    let spec = MetricSpec::round_sphere(1.0);
    for x1 in [0.3, 0.9, 1.4, 2.2] {
        let b = Kernel::default()
            .curvature_bundle(&spec, &ChartPoint::new2(x1, 0.7), 0.0)
            .unwrap();
        let s2 = x1.sin().powi(2);
        assert!((b.riemann_down(0, 1, 0, 1) - s2).abs() < 1e-6);
        assert!((b.scalar - 2.0).abs() < 1e-6);
    }
}

#[test]
fn sphere_of_radius_a_scales_curvature() {
    let a = 2.5;
    let spec = MetricSpec::round_sphere(a);
    let kg = Kernel::default()
        .gauss_curvature_2d(&spec, &ChartPoint::new2(1.0, 0.0), 0.0)
        .unwrap();
    assert!((kg - 1.0 / (a * a)).abs() < 1e-6);
}

#[test]
fn commutator_of_radial_and_scaled_angular_field() {
    let k = Kernel::default();
    let p = ChartPoint::new3(1.3, 0.4, -0.2);
    let dr = VectorField::constant(vec![1.0, 0.0, 0.0]);
    let rdt = VectorField::new(3, |p| vec![0.0, p.coord(0), 0.0]);
    let c = k.commutator(&dr, &rdt, &p).unwrap();
    assert!((c.components[0]).abs() < 1e-9);
    assert!((c.components[1] - 1.0).abs() < 1e-9);
    assert!((c.components[2]).abs() < 1e-9);
    let back = k.commutator(&rdt, &dr, &p).unwrap();
    for i in 0..3 {
        assert!((back.components[i] + c.components[i]).abs() < 1e-12);
    }
}

#[test]
fn covariant_derivative_of_angular_field_on_polar_plane() {
    let p = ChartPoint::new2(1.0, 0.0);
    let x = TangentVector::basis(p, 1);
    let y = VectorField::constant(vec![0.0, 1.0]);
    let d = Kernel::default()
        .covariant_derivative(&x, &y, &p, &MetricSpec::polar(), 0.0)
        .unwrap();
    assert!((d.components[0] + 1.0).abs() < 1e-8);
    assert!(d.components[1].abs() < 1e-8);
}

#[test]
fn analytic_partials_agree_with_finite_differences() {
    let spec = MetricSpec::round_sphere(1.0);
    assert!(spec.has_partials());
    let fd = spec.without_partials();
    let k = Kernel::default();
    for x1 in [0.4, 1.0, 2.5] {
        let p = ChartPoint::new2(x1, 0.2);
        let a = k.christoffel(&spec, &p, 0.0).unwrap();
        let b = k.christoffel(&fd, &p, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    assert!((a.get(i, j, l) - b.get(i, j, l)).abs() < 1e-5);
                }
            }
        }
        let ra = k
            .curvature_bundle(&spec, &p, 0.0)
            .unwrap()
            .riemann_down(0, 1, 0, 1);
        let rb = k
            .curvature_bundle(&fd, &p, 0.0)
            .unwrap()
            .riemann_down(0, 1, 0, 1);
        assert!((ra - rb).abs() < 1e-5);
    }
}

#[test]
fn time_dependent_metric_is_evaluated_at_requested_time() {
    let spec = MetricSpec::new(2, |p, t| {
        let s = (1.0 - 2.0 * t) * p.coord(0).sin().powi(2);
        DMatrix::from_row_slice(2, 2, &[1.0 - 2.0 * t, 0.0, 0.0, s])
    })
    .with_domain(|p| p.coord(0).sin().abs() > 1e-8);
    let kg = Kernel::default()
        .gauss_curvature_2d(&spec, &ChartPoint::new2(1.0, 0.0), 0.25)
        .unwrap();
    assert!((kg - 2.0).abs() < 1e-6);
}
