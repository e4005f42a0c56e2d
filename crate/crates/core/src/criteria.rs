//! Acceptance checks with their pinned tolerances.
//!
//! Each check returns a [`CriterionOutcome`]; the test-suite asserts on them
//! and the CLI `verify` command prints them. The CLI-determinism check lives
//! with the CLI.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Quaternion, UnitQuaternion, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamo::{
    chicone_latushkin_lambda, dynamo_constraint, finite_time_lyapunov, ideal_lambda,
    metric_from_lyapunov, stretching_factors,
};
use crate::error::Result;
use crate::flux_tube::{
    analytic_gauss, analytic_r1212, negative_gauss_condition, tube_metric_3d, tube_surface_metric,
    DetConvention, FlowField, TubeMode, TubeParams,
};
use crate::geometry::{ChartPoint, Kernel, MetricSpec, TangentVector};
use crate::ricci_flow::{
    closed_form_diagonal, flow_eigenrate, integrate, tube_lyapunov_spectrum, FrozenFormRicci,
};
use crate::tolerances::Tolerances;

pub const R1212_REL_TOL: f64 = 1e-6;
pub const R1212_RUNTIME: Duration = Duration::from_secs(5);
pub const FLAT_ABS_TOL: f64 = 1e-8;
pub const SPHERE_TOL: f64 = 1e-6;
pub const EINSTEIN_TRAJECTORY_TOL: f64 = 1e-8;
pub const RK4_RATIO_RANGE: (f64, f64) = (12.0, 20.0);
pub const EIGENRATE_TOL: f64 = 1e-6;
pub const SPECTRUM_TOL: f64 = 1e-12;
pub const CL_SLOPE: f64 = 5.0;
pub const ROUND_TRIP_TOL: f64 = 1e-12;

const SEED: u64 = 0x5eed_7ab1e;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] criterion {:>2}: {} -- {}",
            self.id, self.title, self.detail
        )
    }
}

fn outcome(id: u8, title: &'static str, res: Result<(bool, String)>) -> CriterionOutcome {
    match res {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            title,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            title,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Inclusive grid of `count` points on `[start, stop]`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

type Pair = (f64, f64);

/// `(r0, κ0)` pairs and the 10 × 10 `(s, θ)` grid shared by the tube checks.
fn tube_grid() -> (Vec<Pair>, Vec<Pair>) {
    let params: Vec<(f64, f64)> = [0.05, 0.1]
        .iter()
        .flat_map(|&r0| [0.5, 1.0, 2.0].into_iter().map(move |k| (r0, k)))
        .collect();
    let axis = linspace(0.0, TAU, 10);
    let points = axis
        .iter()
        .flat_map(|&s| axis.iter().map(move |&theta| (s, theta)))
        .collect();
    (params, points)
}

/// Numeric `R_1212` of the tube surface against the closed form.
pub fn r1212_analytic_vs_numeric() -> CriterionOutcome {
    outcome(
        1,
        "tube surface R_1212: kernel vs closed form",
        (|| {
            let kernel = Kernel::default();
            let (params, points) = tube_grid();
            let start = Instant::now();
            let mut worst = 0.0_f64;
            let mut ratio_lo = f64::INFINITY;
            let mut ratio_hi = f64::NEG_INFINITY;
            for &(r0, kappa0) in &params {
                let tube = TubeParams::constant(kappa0, 0.0, r0, TubeMode::Thick);
                let spec = tube_surface_metric(&tube)?;
                for &(s, theta) in &points {
                    let bundle =
                        kernel.curvature_bundle(&spec, &ChartPoint::new2(theta, s), 0.0)?;
                    let numeric = bundle.riemann_down(0, 1, 0, 1);
                    let closed = analytic_r1212(&tube, s, theta);
                    let scale = closed.abs().max(1e-3 * kappa0.abs());
                    worst = worst.max((numeric - closed).abs() / scale);
                    if closed.abs() > 1e-3 * kappa0.abs() {
                        let ratio = numeric / closed;
                        ratio_lo = ratio_lo.min(ratio / r0);
                        ratio_hi = ratio_hi.max(ratio / r0);
                    }
                }
            }
            let elapsed = start.elapsed();
            let passed = worst <= R1212_REL_TOL && elapsed < R1212_RUNTIME;
            Ok((
            passed,
            format!(
                "{} points, max rel err {worst:.3e} (tol {R1212_REL_TOL:e}), numeric/closed in r0*[{ratio_lo:.9}, {ratio_hi:.9}], {:.3}s",
                params.len() * points.len(),
                elapsed.as_secs_f64()
            ),
        ))
        })(),
    )
}

/// Thin-tube sign law of the Gauss curvature.
pub fn gauss_sign_law() -> CriterionOutcome {
    outcome(
        2,
        "Gauss curvature sign law",
        (|| {
            let kernel = Kernel::default();
            let (params, points) = tube_grid();
            let mut mismatches = 0usize;
            let mut numeric_mismatches = 0usize;
            for &(r0, kappa0) in &params {
                let thin = TubeParams::constant(kappa0, 0.0, r0, TubeMode::Thin);
                let thick = TubeParams {
                    mode: TubeMode::Thick,
                    ..thin.clone()
                };
                let spec = tube_surface_metric(&thick)?;
                for &(s, theta) in &points {
                    let kg = analytic_gauss(&thin, s, theta, DetConvention::RadiusSquared)?;
                    let expect_negative = kappa0 * theta.cos() > 0.0;
                    if (kg < 0.0) != expect_negative
                        || negative_gauss_condition(&thin, s, theta) != expect_negative
                    {
                        mismatches += 1;
                    }
                    let numeric =
                        kernel.gauss_curvature_2d(&spec, &ChartPoint::new2(theta, s), 0.0)?;
                    if (numeric < 0.0) != expect_negative {
                        numeric_mismatches += 1;
                    }
                }
            }
            Ok((
            mismatches == 0 && numeric_mismatches == 0,
            format!("{mismatches} closed-form mismatches, {numeric_mismatches} kernel (thick) mismatches"),
        ))
        })(),
    )
}

/// Straight tube is flat.
pub fn flat_annihilation() -> CriterionOutcome {
    outcome(
        3,
        "straight tube is flat",
        (|| {
            let kernel = Kernel::default();
            let spec = tube_metric_3d(&TubeParams::constant(0.0, 0.3, 0.1, TubeMode::Thick));
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut worst = 0.0_f64;
            for _ in 0..50 {
                let p = ChartPoint::new3(
                    rng.gen_range(0.1..2.0),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..10.0),
                );
                let b = kernel.curvature_bundle(&spec, &p, 0.0)?;
                worst = worst.max(b.max_abs_down()).max(b.max_abs_up());
            }
            Ok((
                worst < FLAT_ABS_TOL,
                format!("max |Riemann| = {worst:.3e} over 50 points (tol {FLAT_ABS_TOL:e})"),
            ))
        })(),
    )
}

/// Unit sphere sectional and Gauss curvature equal one.
pub fn sphere_oracle() -> CriterionOutcome {
    outcome(
        4,
        "unit sphere curvature",
        (|| {
            let kernel = Kernel::default();
            let spec = MetricSpec::round_sphere(1.0).without_partials();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
            let mut worst = 0.0_f64;
            for _ in 0..20 {
                let p = ChartPoint::new2(rng.gen_range(0.3..PI - 0.3), rng.gen_range(0.0..TAU));
                let sec = kernel.sectional_curvature(
                    &spec,
                    &p,
                    &TangentVector::basis(p, 0),
                    &TangentVector::basis(p, 1),
                    0.0,
                )?;
                let gauss = kernel.gauss_curvature_2d(&spec, &p, 0.0)?;
                worst = worst.max((sec - 1.0).abs()).max((gauss - 1.0).abs());
            }
            Ok((
                worst <= SPHERE_TOL,
                format!("max |K - 1| = {worst:.3e} over 20 points (tol {SPHERE_TOL:e})"),
            ))
        })(),
    )
}

/// Max deviation from `(1 − 2t) g0` of the pointwise sphere flow at step `dt`.
pub fn einstein_sphere_error(dt: f64) -> Result<f64> {
    let kernel = Kernel::default();
    let p = ChartPoint::new2(1.0, 0.5);
    let source = FrozenFormRicci::new(
        MetricSpec::round_sphere(1.0).without_partials(),
        p,
        0.0,
        kernel,
    )?;
    let start = source.initial_state();
    let g0 = start.metric.clone();
    let traj = integrate(&source, start, dt, 0.1, &kernel.tol)?;
    Ok(traj
        .iter()
        .map(|s| (&s.metric - &g0 * (1.0 - 2.0 * s.t)).amax())
        .fold(0.0, f64::max))
}

/// Einstein sphere trajectory and RK4 order.
pub fn ricci_flow_exactness() -> CriterionOutcome {
    outcome(
        5,
        "Einstein sphere Ricci flow + RK4 order",
        (|| {
            let coarse = einstein_sphere_error(1e-3)?;
            let fine = einstein_sphere_error(5e-4)?;
            let ratio = coarse / fine;
            let (lo, hi) = RK4_RATIO_RANGE;
            let trajectory_ok = coarse <= EINSTEIN_TRAJECTORY_TOL;
            let order_ok = ratio >= lo && ratio <= hi;
            Ok((
            trajectory_ok && order_ok,
            format!(
                "err(dt=1e-3) = {coarse:.3e} (tol {EINSTEIN_TRAJECTORY_TOL:e}, {}), err(dt=5e-4) = {fine:.3e}, ratio {ratio:.3} (need [{lo}, {hi}], {})",
                if trajectory_ok { "ok" } else { "FAIL" },
                if order_ok { "ok" } else { "FAIL" }
            ),
        ))
        })(),
    )
}

/// Eigen-rates recovered from the diagonal closed form.
pub fn diagonal_round_trip() -> CriterionOutcome {
    outcome(
        6,
        "diagonal closed form -> eigen-rates",
        (|| {
            let lambdas = [1.0, 0.5, -0.25];
            let dt = 1e-3;
            let series: Vec<(f64, DMatrix<f64>)> = (-2..=2)
                .map(|i| i as f64 * dt + 0.3)
                .map(|t| (t, closed_form_diagonal(&lambdas, t)))
                .collect();
            let rates = flow_eigenrate(&series)?;
            let worst = rates
                .iter()
                .zip(&lambdas)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok((
                worst <= EIGENRATE_TOL,
                format!("recovered {rates:?}, max err {worst:.3e} (tol {EIGENRATE_TOL:e})"),
            ))
        })(),
    )
}

/// Tube spectrum and dynamo inequality.
pub fn spectrum_constraint_harness() -> CriterionOutcome {
    outcome(
        7,
        "tube spectrum + dynamo inequality",
        (|| {
            let tol = Tolerances::default();
            let flow = FlowField::uniform(-0.1, 0.0, 0.0, 1.0);
            let spec = tube_lyapunov_spectrum(&flow, 1.0, FRAC_PI_4, &tol)?;
            let expect = [0.0, -0.2, 0.9];
            let spec_err = spec
                .iter()
                .zip(&expect)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let v = dynamo_constraint(&flow, FRAC_PI_4, 1.0, &tol)?;
            let point_ok =
                spec_err <= SPECTRUM_TOL && v.satisfied && (v.margin - 0.9).abs() <= SPECTRUM_TOL;

            let mut disagreements = 0usize;
            let mut scanned = 0usize;
            for &v_r in &linspace(-1.0, 1.0, 10) {
                for &r in &linspace(0.1, 2.0, 10) {
                    for &omega1 in &linspace(-2.0, 2.0, 10) {
                        for &theta in &linspace(-1.5, 1.5, 10) {
                            scanned += 1;
                            let flow = FlowField::uniform(v_r, 0.0, 0.0, omega1);
                            let verdict = dynamo_constraint(&flow, theta, r, &tol)?;
                            let direct = (omega1 * theta.tan()).abs() >= (v_r / r).abs();
                            let lambda2 = 2.0 * v_r / r;
                            let lambda3 = v_r / r + omega1 * theta.tan();
                            if verdict.satisfied != direct
                                || verdict.contract_ok != (lambda2 < 0.0)
                                || verdict.stretch_ok != (lambda3 > 0.0)
                            {
                                disagreements += 1;
                            }
                        }
                    }
                }
            }
            Ok((
            point_ok && disagreements == 0,
            format!(
                "spectrum {spec:?} (err {spec_err:.1e}), margin {:.15}, {disagreements} disagreements in {scanned} tuples",
                v.margin
            ),
        ))
        })(),
    )
}

/// Diffusive eigenvalue approaches its ideal limit.
pub fn chicone_latushkin_limit() -> CriterionOutcome {
    outcome(
        8,
        "diffusive dynamo eigenvalue limit",
        (|| {
            let target = Complex64::new(0.0, 2.0);
            let mut ok = true;
            let mut parts = Vec::new();
            for eps in [1e-2, 1e-4, 1e-6] {
                let dist = (chicone_latushkin_lambda(eps, 4.0)? - target).norm();
                ok &= dist <= CL_SLOPE * eps;
                parts.push(format!("eps={eps:e}: |d|={dist:.3e}"));
            }
            let zero = chicone_latushkin_lambda(0.0, -4.0)?;
            let ideal = ideal_lambda(-4.0);
            let exact = zero == Complex64::new(2.0, 0.0) && ideal == Complex64::new(2.0, 0.0);
            Ok((
                ok && exact,
                format!("{}; lambda_0(kappa=-4) = {zero}", parts.join(", ")),
            ))
        })(),
    )
}

fn random_frame(rng: &mut impl Rng) -> [Vector3<f64>; 3] {
    // Uniform random rotation (Shoemake).
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let q = Quaternion::new(
        (1.0 - u1).sqrt() * (TAU * u2).sin(),
        (1.0 - u1).sqrt() * (TAU * u2).cos(),
        u1.sqrt() * (TAU * u3).sin(),
        u1.sqrt() * (TAU * u3).cos(),
    );
    let rot = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
    let m = rot.matrix();
    [m.column(0).into(), m.column(1).into(), m.column(2).into()]
}

/// Stretching metric → eigenvalues → exponents round trip.
pub fn lyapunov_round_trip() -> CriterionOutcome {
    outcome(
        9,
        "Lyapunov metric round trip",
        (|| {
            let tol = Tolerances::default();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
            let horizon = 1.7;
            let mut worst = 0.0_f64;
            for _ in 0..1000 {
                let mut lams = [0.0; 3];
                for l in &mut lams {
                    *l = 10f64.powf(rng.gen_range(-3.0..3.0));
                }
                let frame = random_frame(&mut rng);
                let g = metric_from_lyapunov(lams, frame, &tol)?;
                let spectrum = finite_time_lyapunov(&stretching_factors(&g), horizon)?;
                let mut sorted = lams;
                sorted.sort_by(f64::total_cmp);
                for (got, want) in spectrum.stretching.iter().zip(&sorted) {
                    worst = worst.max((got - want).abs() / want.max(1.0));
                }
            }
            Ok((
            worst <= ROUND_TRIP_TOL,
            format!("1000 triples, max |dLambda|/max(1, Lambda) = {worst:.3e} (tol {ROUND_TRIP_TOL:e})"),
        ))
        })(),
    )
}

/// Criteria 1–9 in order.
pub fn run_core_criteria() -> Vec<CriterionOutcome> {
    vec![
        r1212_analytic_vs_numeric(),
        gauss_sign_law(),
        flat_annihilation(),
        sphere_oracle(),
        ricci_flow_exactness(),
        diagonal_round_trip(),
        spectrum_constraint_harness(),
        chicone_latushkin_limit(),
        lyapunov_round_trip(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_is_inclusive() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f = random_frame(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((f[i].dot(&f[j]) - target).abs() < 1e-14);
                }
            }
        }
    }
}
