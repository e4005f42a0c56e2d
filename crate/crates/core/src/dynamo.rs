//! Lyapunov spectra, dynamo criteria, field growth and the diffusive
//! geodesic-flow dynamo eigenvalue.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flux_tube::FlowField;
use crate::linalg::jacobi_eigen;
use crate::ricci_flow::{checked_tan, tube_lyapunov_spectrum};
use crate::tolerances::Tolerances;

/// Stretching factors and the matching finite-time exponents over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpectrum {
    /// `Λ_i > 0`.
    pub stretching: Vec<f64>,
    /// `λ_i = ln(Λ_i) / (2t)`.
    pub exponents: Vec<f64>,
    /// `γ_i = −λ_i`.
    pub gammas: Vec<f64>,
    pub horizon: f64,
}

pub fn finite_time_lyapunov(stretching: &[f64], t: f64) -> Result<LyapunovSpectrum> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositive("time horizon"));
    }
    if stretching.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::NonPositive("stretching factor"));
    }
    let exponents: Vec<f64> = stretching.iter().map(|l| l.ln() / (2.0 * t)).collect();
    let gammas = exponents.iter().map(|l| -l).collect();
    Ok(LyapunovSpectrum {
        stretching: stretching.to_vec(),
        exponents,
        gammas,
        horizon: t,
    })
}

/// Stretching factor whose finite-time exponent over `t` is `lambda`.
pub fn stretching_from_exponent(lambda: f64, t: f64) -> f64 {
    (2.0 * lambda * t).exp()
}

/// Long-time exponent estimate with an error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovLimit {
    /// Finite-time exponent at the largest sampled time.
    pub estimate: f64,
    /// Drift of the finite-time exponent across the last three samples
    /// (least-squares slope times their time span).
    pub error_bar: f64,
}

/// Estimates `lim_{t→∞} ln(Λ_i)/(2t)` per direction from samples
/// `(Λ(t), t)` with strictly increasing `t`.
pub fn infinite_lyapunov(series: &[(Vec<f64>, f64)]) -> Result<Vec<LyapunovLimit>> {
    if series.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: series.len(),
        });
    }
    if series.windows(2).any(|w| !(w[1].1 > w[0].1)) {
        return Err(Error::InvalidArgument(
            "sample times must be strictly increasing".into(),
        ));
    }
    let dim = series[0].0.len();
    let spectra = series
        .iter()
        .map(|(lams, t)| {
            if lams.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: lams.len(),
                });
            }
            finite_time_lyapunov(lams, *t)
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &spectra[spectra.len() - 3..];
    let ts: Vec<f64> = tail.iter().map(|s| s.horizon).collect();
    let t_mean = ts.iter().sum::<f64>() / 3.0;
    let sxx: f64 = ts.iter().map(|t| (t - t_mean).powi(2)).sum();
    let span = ts[2] - ts[0];
    Ok((0..dim)
        .map(|i| {
            let ys: Vec<f64> = tail.iter().map(|s| s.exponents[i]).collect();
            let y_mean = ys.iter().sum::<f64>() / 3.0;
            let sxy: f64 = ts
                .iter()
                .zip(&ys)
                .map(|(t, y)| (t - t_mean) * (y - y_mean))
                .sum();
            let slope = sxy / sxx;
            LyapunovLimit {
                estimate: ys[2],
                error_bar: (slope * span).abs(),
            }
        })
        .collect())
}

/// `g = Σ Λ_i e_i ⊗ e_i` over an orthonormal frame.
pub fn metric_from_lyapunov(
    stretching: [f64; 3],
    frame: [Vector3<f64>; 3],
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    if stretching.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::NonPositive("stretching factor"));
    }
    let mut dev = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((frame[i].dot(&frame[j]) - target).abs());
        }
    }
    if !(dev <= tol.frame_gram) {
        return Err(Error::NonOrthonormalFrame(dev));
    }
    let mut g = DMatrix::zeros(3, 3);
    for (lam, e) in stretching.iter().zip(&frame) {
        for a in 0..3 {
            for b in 0..3 {
                g[(a, b)] += lam * e[a] * e[b];
            }
        }
    }
    Ok(g)
}

/// Ascending eigenvalues of a symmetric stretching metric.
pub fn stretching_factors(g: &DMatrix<f64>) -> Vec<f64> {
    jacobi_eigen(g).values
}

/// Outcome of the dynamo inequality `|ω1 tan θ| ≥ |v_r / r|`.
///
/// The tube spectrum gives `λ2 = 2 v_r / r`, twice the right-hand side used
/// in the inequality; both versions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamoVerdict {
    /// `margin ≥ 0`.
    pub satisfied: bool,
    /// `|ω1 tan θ| − |v_r / r|`.
    pub margin: f64,
    /// `λ3 > 0`.
    pub stretch_ok: bool,
    /// `λ2 < 0`.
    pub contract_ok: bool,
    /// `|ω1 tan θ| − |λ2|` with `λ2 = 2 v_r / r` from the spectrum.
    pub spectrum_margin: f64,
    pub spectrum_satisfied: bool,
}

pub fn dynamo_constraint(
    flow: &FlowField,
    theta: f64,
    r: f64,
    tol: &Tolerances,
) -> Result<DynamoVerdict> {
    let spectrum = tube_lyapunov_spectrum(flow, r, theta, tol)?;
    let tan = checked_tan(theta, tol)?;
    let lhs = (flow.omega1 * tan).abs();
    let margin = lhs - (flow.v_r.at(r) / r).abs();
    let spectrum_margin = lhs - spectrum[1].abs();
    Ok(DynamoVerdict {
        satisfied: margin >= 0.0,
        margin,
        stretch_ok: spectrum[2] > 0.0,
        contract_ok: spectrum[1] < 0.0,
        spectrum_margin,
        spectrum_satisfied: spectrum_margin >= 0.0,
    })
}

/// Growth exponents of the azimuthal and axial field components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrowth {
    /// `v_r / r`.
    pub rate_theta: f64,
    /// `v_r / r + ω1 v_r tan θ`. The second term carries an extra factor of
    /// `v_r` relative to the `λ3` of the tube spectrum.
    pub rate_s: f64,
    pub amplification_theta: f64,
    pub amplification_s: f64,
}

pub fn field_growth(
    flow: &FlowField,
    theta: f64,
    r: f64,
    t: f64,
    tol: &Tolerances,
) -> Result<FieldGrowth> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let tan = checked_tan(theta, tol)?;
    let v_r = flow.v_r.at(r);
    let rate_theta = v_r / r;
    let rate_s = rate_theta + flow.omega1 * v_r * tan;
    Ok(FieldGrowth {
        rate_theta,
        rate_s,
        amplification_theta: (rate_theta * t).exp(),
        amplification_s: (rate_s * t).exp(),
    })
}

/// Diffusive dynamo eigenvalue
/// `λ_ε = ½ [−ε(1 + κ²) + √(ε²(1 − κ²)² − 4κ)]` with the principal root.
/// Its real part is the growth rate.
pub fn chicone_latushkin_lambda(eps: f64, kappa: f64) -> Result<Complex64> {
    if !eps.is_finite() || !kappa.is_finite() {
        return Err(Error::NonFinite("eps/kappa"));
    }
    if eps < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "resistive coefficient must be non-negative, got {eps}"
        )));
    }
    let k2 = kappa * kappa;
    let disc = eps * eps * (1.0 - k2).powi(2) - 4.0 * kappa;
    let root = principal_sqrt(disc);
    Ok((Complex64::new(-eps * (1.0 + k2), 0.0) + root) * 0.5)
}

fn principal_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// `ε → 0` limit: `i √κ` for `κ ≥ 0`, `√(−κ)` (real, positive) for `κ < 0`.
pub fn ideal_lambda(kappa: f64) -> Complex64 {
    if kappa >= 0.0 {
        Complex64::new(0.0, kappa.sqrt())
    } else {
        Complex64::new((-kappa).sqrt(), 0.0)
    }
}

/// Fast dynamo on a constant-curvature geodesic flow: `κ < 0` and `Re_m > √(−κ)`.
pub fn fast_dynamo_condition(re_m: f64, kappa: f64) -> Result<bool> {
    if !(re_m > 0.0) || !re_m.is_finite() {
        return Err(Error::NonPositive("magnetic Reynolds number"));
    }
    Ok(kappa < 0.0 && re_m > (-kappa).sqrt())
}

/// Resistive coefficient identified with an inverse magnetic Reynolds number.
pub fn eps_from_reynolds(re_m: f64) -> Result<f64> {
    if !(re_m > 0.0) || !re_m.is_finite() {
        return Err(Error::NonPositive("magnetic Reynolds number"));
    }
    Ok(1.0 / re_m)
}

/// Lyapunov rates `γ_i = −λ_i` from Ricci eigenvalues, with the indices of
/// any `λ_i > 0` (which break the expected `λ_i ≤ 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSignReport {
    pub gammas: Vec<f64>,
    pub violations: Vec<usize>,
}

pub fn ricci_to_lyapunov(ricci_lambdas: &[f64]) -> RicciSignReport {
    RicciSignReport {
        gammas: ricci_lambdas.iter().map(|l| -l).collect(),
        violations: ricci_lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > 0.0)
            .map(|(i, _)| i)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4};

    fn axes() -> [Vector3<f64>; 3] {
        [Vector3::x(), Vector3::y(), Vector3::z()]
    }

    #[test]
    fn finite_time_examples() {
        let s = finite_time_lyapunov(&[1.0, 1.0, 1.0], 5.0).unwrap();
        assert_eq!(s.exponents, vec![0.0, 0.0, 0.0]);

        let s = finite_time_lyapunov(&[E * E, 1.0, E.powi(-2)], 1.0).unwrap();
        assert!((s.exponents[0] - 1.0).abs() < 1e-15);
        assert_eq!(s.exponents[1], 0.0);
        assert!((s.exponents[2] + 1.0).abs() < 1e-15);
        assert_eq!(s.gammas[0], -s.exponents[0]);

        let a = finite_time_lyapunov(&[3.0, 0.2], 1.5).unwrap();
        let b = finite_time_lyapunov(&[3.0, 0.2], 3.0).unwrap();
        for (x, y) in a.exponents.iter().zip(&b.exponents) {
            assert!((x - 2.0 * y).abs() < 1e-15);
        }
    }

    #[test]
    fn finite_time_errors() {
        assert!(finite_time_lyapunov(&[1.0, 0.0], 1.0).is_err());
        assert!(finite_time_lyapunov(&[1.0, -2.0], 1.0).is_err());
        assert!(finite_time_lyapunov(&[1.0], 0.0).is_err());
    }

    #[test]
    fn infinite_time_examples() {
        let series: Vec<_> = [10.0_f64, 20.0, 40.0]
            .iter()
            .map(|&t| (vec![(0.6 * t).exp()], t))
            .collect();
        let lim = infinite_lyapunov(&series).unwrap();
        assert!((lim[0].estimate - 0.3).abs() < 1e-15);
        assert!(lim[0].error_bar < 1e-15);

        let constant: Vec<_> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&t| (vec![5.0], t))
            .collect();
        let lim = infinite_lyapunov(&constant).unwrap();
        assert!(lim[0].estimate.abs() < 5.0_f64.ln() / 2000.0 + 1e-15);

        let ts = [10.0_f64, 20.0, 40.0];
        let series: Vec<_> = ts.iter().map(|&t| (vec![(0.6 * t).exp() * t], t)).collect();
        let lim = infinite_lyapunov(&series).unwrap();
        let t = 40.0_f64;
        assert!((lim[0].estimate - 0.3).abs() <= (t.ln() / (2.0 * t)).abs() + 1e-15);

        assert!(matches!(
            infinite_lyapunov(&series[..2]),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn metric_from_stretching_examples() {
        let tol = Tolerances::default();
        assert_eq!(
            metric_from_lyapunov([1.0, 1.0, 1.0], axes(), &tol).unwrap(),
            DMatrix::identity(3, 3)
        );
        let g = metric_from_lyapunov([4.0, 1.0, 1.0], axes(), &tol).unwrap();
        assert_eq!(
            g,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0, 1.0]))
        );

        let skew = [
            Vector3::x(),
            Vector3::new(1.0, 1.0, 0.0).normalize(),
            Vector3::z(),
        ];
        assert!(matches!(
            metric_from_lyapunov([1.0, 2.0, 3.0], skew, &tol),
            Err(Error::NonOrthonormalFrame(_))
        ));
        assert!(metric_from_lyapunov([1.0, 0.0, 3.0], axes(), &tol).is_err());
    }

    #[test]
    fn constraint_examples() {
        let tol = Tolerances::default();
        let flow = FlowField::uniform(-0.1, 0.0, 0.0, 1.0);
        let v = dynamo_constraint(&flow, FRAC_PI_4, 1.0, &tol).unwrap();
        assert!((v.margin - 0.9).abs() < 1e-15);
        assert!(v.satisfied && v.contract_ok && v.stretch_ok);
        assert!((v.spectrum_margin - 0.8).abs() < 1e-15);

        let v = dynamo_constraint(&flow, 0.0, 1.0, &tol).unwrap();
        assert!(!v.satisfied);

        let flow = FlowField::uniform(0.0, 0.0, 0.0, 1.5);
        let v = dynamo_constraint(&flow, FRAC_PI_4, 1.0, &tol).unwrap();
        assert!(v.satisfied && !v.contract_ok);
        assert!((v.margin - 1.5).abs() < 1e-15);

        assert!(matches!(
            dynamo_constraint(&flow, FRAC_PI_2, 1.0, &tol),
            Err(Error::TangentSingularity(_))
        ));
    }

    #[test]
    fn growth_examples() {
        let tol = Tolerances::default();
        let g = field_growth(
            &FlowField::uniform(0.0, 0.0, 0.0, 3.0),
            0.4,
            1.0,
            10.0,
            &tol,
        )
        .unwrap();
        assert_eq!(
            (
                g.rate_theta,
                g.rate_s,
                g.amplification_theta,
                g.amplification_s
            ),
            (0.0, 0.0, 1.0, 1.0)
        );

        let g = field_growth(
            &FlowField::uniform(-0.1, 0.0, 0.0, 2.0),
            FRAC_PI_4,
            1.0,
            10.0,
            &tol,
        )
        .unwrap();
        assert!((g.rate_theta + 0.1).abs() < 1e-15);
        assert!((g.rate_s + 0.3).abs() < 1e-15);
        assert!((g.amplification_theta - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((g.amplification_s - (-3.0_f64).exp()).abs() < 1e-14);

        let g = field_growth(
            &FlowField::uniform(-0.4, 0.0, 0.0, 0.0),
            1.1,
            2.0,
            1.0,
            &tol,
        )
        .unwrap();
        assert_eq!(g.rate_s, g.rate_theta);
    }

    #[test]
    fn diffusive_eigenvalue_examples() {
        assert_eq!(
            chicone_latushkin_lambda(0.0, 4.0).unwrap(),
            Complex64::new(0.0, 2.0)
        );
        assert_eq!(
            chicone_latushkin_lambda(1.0, 0.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        // Independent evaluation: ½(−17 + √241)
        let expected = 0.5 * (-17.0 + 241.0_f64.sqrt());
        let got = chicone_latushkin_lambda(1.0, -4.0).unwrap();
        assert!((got.re - expected).abs() < 1e-14 && got.im == 0.0);
        assert!((got.re + 0.7378).abs() < 1e-3);
        assert!(chicone_latushkin_lambda(-1.0, 1.0).is_err());
    }

    #[test]
    fn ideal_limit() {
        assert_eq!(ideal_lambda(4.0), Complex64::new(0.0, 2.0));
        assert_eq!(ideal_lambda(0.0), Complex64::new(0.0, 0.0));
        assert_eq!(ideal_lambda(-4.0), Complex64::new(2.0, 0.0));
        for k in [1.0, 4.0, 9.0] {
            assert!((chicone_latushkin_lambda(1e-8, k).unwrap() - ideal_lambda(k)).norm() < 1e-6);
        }
        for k in [-0.5, -4.0, -9.0] {
            assert_eq!(chicone_latushkin_lambda(0.0, k).unwrap(), ideal_lambda(k));
        }
    }

    #[test]
    fn fast_dynamo_examples() {
        assert!(fast_dynamo_condition(10.0, -4.0).unwrap());
        assert!(!fast_dynamo_condition(10.0, 1.0).unwrap());
        assert!(!fast_dynamo_condition(1.0, -4.0).unwrap());
        assert!(fast_dynamo_condition(0.0, -4.0).is_err());
        assert_eq!(eps_from_reynolds(4.0).unwrap(), 0.25);
    }

    #[test]
    fn ricci_sign_report() {
        assert_eq!(
            ricci_to_lyapunov(&[0.0, 0.0, 0.0]).violations,
            Vec::<usize>::new()
        );
        let r = ricci_to_lyapunov(&[-1.0, -2.0, -3.0]);
        assert_eq!(r.gammas, vec![1.0, 2.0, 3.0]);
        assert!(r.violations.is_empty());
        let r = ricci_to_lyapunov(&[0.5, -1.0, 0.0]);
        assert_eq!(r.gammas, vec![-0.5, 1.0, -0.0]);
        assert_eq!(r.violations, vec![0]);
    }
}
