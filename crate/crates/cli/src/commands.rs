use std::f64::consts::{FRAC_PI_2, PI};

use anyhow::Context;
use rayon::prelude::*;
use ricci_dynamo::criteria::{run_core_criteria, CriterionOutcome};
use ricci_dynamo::dynamo::{
    chicone_latushkin_lambda, dynamo_constraint, eps_from_reynolds, field_growth,
    ricci_to_lyapunov, stretching_from_exponent,
};
use ricci_dynamo::flux_tube::{
    analytic_gauss, analytic_r1212, negative_gauss_condition, numeric_r1212_closed_form,
    tube_metric_3d, tube_surface_metric, twist_angle_with, DetConvention, TubeMode, TubeParams,
};
use ricci_dynamo::geometry::{ChartPoint, Kernel, MetricSpec, TangentVector};
use ricci_dynamo::ricci_flow::{
    integrate, ricci_eigenproblem, tube_lyapunov_spectrum, FrozenFormRicci, RicciSource,
};

use crate::cli::Command;
use crate::config::{MetricChoice, RunConfig, Sweep};
use crate::output::ResultTable;

/// Distance from `π/2 + kπ` inside which θ is pulled back for tangent-based outputs.
pub const THETA_CLAMP: f64 = 1e-6;

const FLAG_THETA_CLAMPED: &str = "theta_clamped_below_tangent_singularity";

/// Moves θ within [`THETA_CLAMP`] of `π/2 + kπ` to `π/2 + kπ − THETA_CLAMP`.
pub fn clamp_theta(theta: f64) -> (f64, bool) {
    let k = ((theta - FRAC_PI_2) / PI).round();
    let pole = FRAC_PI_2 + k * PI;
    if (theta - pole).abs() < THETA_CLAMP {
        (pole - THETA_CLAMP, true)
    } else {
        (theta, false)
    }
}

struct PointResult {
    rows: Vec<Vec<f64>>,
    flags: Vec<String>,
}

impl PointResult {
    fn one(row: Vec<f64>) -> Self {
        Self {
            rows: vec![row],
            flags: Vec::new(),
        }
    }
}

fn columns_for(command: Command) -> Vec<&'static str> {
    match command {
        Command::Curvature => vec![
            "x1",
            "x2",
            "x3",
            "scalar",
            "ric_11",
            "ric_12",
            "ric_13",
            "ric_22",
            "ric_23",
            "ric_33",
            "riemann_max_abs",
            "christoffel_max_abs",
            "k12",
        ],
        Command::Tube => vec![
            "s",
            "theta_r",
            "theta",
            "stretch",
            "r1212_numeric",
            "r1212_closed",
            "r1212_closed_times_r0",
            "K_G",
            "K_G_det",
            "K_G_numeric",
            "negative_gauss",
        ],
        Command::RicciFlow => vec!["t", "g11", "g22", "g33", "lambda1", "lambda2", "lambda3"],
        Command::Lyapunov => vec![
            "theta",
            "r",
            "lambda1",
            "lambda2",
            "lambda3",
            "stretch1",
            "stretch2",
            "stretch3",
            "outside_regime",
        ],
        Command::Dynamo => vec![
            "theta",
            "r",
            "margin",
            "satisfied",
            "spectrum_margin",
            "spectrum_satisfied",
            "stretch_ok",
            "contract_ok",
            "rate_theta",
            "rate_s",
            "amplification_theta",
            "amplification_s",
            "outside_regime",
        ],
        Command::ClSpectrum => vec!["eps", "kappa", "re_lambda", "im_lambda"],
        Command::Verify => unreachable!("verify has no table"),
    }
}

fn static_flags(command: Command, cfg: &RunConfig) -> Vec<&'static str> {
    match command {
        Command::Tube => vec![
            "closed_form_r1212_lacks_r0_factor",
            "K_G_divides_by_r0_squared_not_det_g",
            "thick_tube_K_approximation_contradicts_stretch",
        ],
        Command::RicciFlow => vec!["pointwise_flow_with_frozen_spatial_form"],
        Command::Lyapunov => vec![
            "lambda2_is_twice_the_dynamo_inequality_rate",
            "nonpositive_ricci_claim_vs_required_positive_stretching",
        ],
        Command::Dynamo => vec![
            "inequality_uses_vr_over_r_while_spectrum_gives_2vr_over_r",
            "azimuthal_growth_rate_differs_from_lambda2_by_factor_4",
            "axial_growth_exponent_has_extra_vr_factor",
        ],
        Command::ClSpectrum if cfg.eps_from_rem => vec!["eps_identified_with_inverse_rem"],
        _ => Vec::new(),
    }
}

/// Cartesian product of the sweeps, first sweep outermost.
fn grid(cfg: &RunConfig) -> Vec<(Vec<f64>, RunConfig)> {
    let mut points = vec![(Vec::new(), cfg.clone())];
    for sweep in &cfg.sweeps {
        let values = sweep.values();
        points = points
            .into_iter()
            .flat_map(|(coords, c)| {
                values.iter().map(move |&v| {
                    let mut coords = coords.clone();
                    coords.push(v);
                    (coords, c.with_value(&sweep.var, v))
                })
            })
            .collect();
    }
    points
}

/// Evaluates a table-producing command over the configured grid.
pub fn run_table(command: Command, cfg: &RunConfig) -> anyhow::Result<ResultTable> {
    let base = columns_for(command);
    // Swept variables already present as a column are not repeated.
    let prefix: Vec<&Sweep> = cfg
        .sweeps
        .iter()
        .filter(|s| !base.contains(&s.var.as_str()))
        .collect();
    let keep: Vec<bool> = cfg
        .sweeps
        .iter()
        .map(|s| !base.contains(&s.var.as_str()))
        .collect();
    let mut columns: Vec<String> = prefix.iter().map(|s| s.var.clone()).collect();
    columns.extend(base.iter().map(|c| c.to_string()));

    let mut table = ResultTable::new(command.name(), columns, cfg);
    for f in static_flags(command, cfg) {
        table.flag(f);
    }
    let points = grid(cfg);
    let results: Vec<anyhow::Result<PointResult>> = points
        .par_iter()
        .map(|(_, point_cfg)| evaluate(command, point_cfg))
        .collect();
    for ((coords, _), res) in points.iter().zip(results) {
        let res = res?;
        let lead: Vec<f64> = coords
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| *v)
            .collect();
        for row in res.rows {
            let mut full = lead.clone();
            full.extend(row);
            table.rows.push(full);
        }
        for f in res.flags {
            table.flag(f);
        }
    }
    Ok(table)
}

fn evaluate(command: Command, cfg: &RunConfig) -> anyhow::Result<PointResult> {
    match command {
        Command::Curvature => curvature_point(cfg),
        Command::Tube => tube_point(cfg),
        Command::RicciFlow => ricci_flow_point(cfg),
        Command::Lyapunov => lyapunov_point(cfg),
        Command::Dynamo => dynamo_point(cfg),
        Command::ClSpectrum => cl_point(cfg),
        Command::Verify => unreachable!("verify has no table"),
    }
}

fn metric_and_point(
    choice: MetricChoice,
    cfg: &RunConfig,
) -> anyhow::Result<(MetricSpec, ChartPoint)> {
    Ok(match choice {
        MetricChoice::Tube => (
            tube_metric_3d(&cfg.tube_params()?),
            ChartPoint::new3(cfg.r, cfg.theta, cfg.s),
        ),
        MetricChoice::Surface => (
            tube_surface_metric(&cfg.tube_params()?)?,
            ChartPoint::new2(cfg.theta, cfg.s),
        ),
        MetricChoice::Sphere => (
            MetricSpec::round_sphere(1.0),
            ChartPoint::new2(cfg.theta, cfg.s),
        ),
        MetricChoice::Polar => (MetricSpec::polar(), ChartPoint::new2(cfg.r, cfg.theta)),
    })
}

fn bool_val(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn curvature_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let kernel = Kernel::new(cfg.tolerances());
    let (spec, p) = metric_and_point(cfg.metric.unwrap_or(MetricChoice::Tube), cfg)?;
    let bundle = kernel.curvature_bundle(&spec, &p, 0.0)?;
    let gamma = kernel.christoffel(&spec, &p, 0.0)?;
    let k12 = kernel.sectional_curvature(
        &spec,
        &p,
        &TangentVector::basis(p, 0),
        &TangentVector::basis(p, 1),
        0.0,
    )?;
    let ric = |i: usize, j: usize| {
        if i < p.dim() && j < p.dim() {
            bundle.ricci[(i, j)]
        } else {
            0.0
        }
    };
    let coord = |i: usize| if i < p.dim() { p.coord(i) } else { 0.0 };
    Ok(PointResult::one(vec![
        coord(0),
        coord(1),
        coord(2),
        bundle.scalar,
        ric(0, 0),
        ric(0, 1),
        ric(0, 2),
        ric(1, 1),
        ric(1, 2),
        ric(2, 2),
        bundle.max_abs_down(),
        gamma.max_abs(),
        k12,
    ]))
}

/// `K_G` follows the configured mode. Everything compared against the kernel
/// uses the full stretch `K = 1 − r0 κ cos θ`: with `K ≡ 1` the surface is flat.
fn tube_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let tol = cfg.tolerances();
    let kernel = Kernel::new(tol);
    let params = cfg.tube_params()?;
    let full = TubeParams {
        mode: TubeMode::Thick,
        ..params.clone()
    };
    let spec = tube_surface_metric(&full)?;
    let (theta_r, s) = (cfg.theta, cfg.s);
    let theta = twist_angle_with(&params, theta_r, s, tol.quadrature_rel)?;
    let p = ChartPoint::new2(theta_r, s);
    let bundle = kernel.curvature_bundle(&spec, &p, 0.0)?;
    let r1212 = bundle.riemann_down(0, 1, 0, 1);
    let numeric_gauss = r1212 / bundle.metric.determinant();
    let mut res = PointResult::one(vec![
        s,
        theta_r,
        theta,
        full.stretch(full.r0, theta, s),
        r1212,
        analytic_r1212(&full, s, theta),
        numeric_r1212_closed_form(&full, s, theta),
        analytic_gauss(&params, s, theta, DetConvention::RadiusSquared)?,
        analytic_gauss(&full, s, theta, DetConvention::Determinant)?,
        numeric_gauss,
        bool_val(negative_gauss_condition(&params, s, theta)),
    ]);
    if params.mode == TubeMode::Thin {
        res.flags.push("thin_mode_K_G_is_small_radius_limit".into());
    }
    Ok(res)
}

fn ricci_flow_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let tol = cfg.tolerances();
    let kernel = Kernel::new(tol);
    let (spec, p) = metric_and_point(cfg.metric.unwrap_or(MetricChoice::Sphere), cfg)?;
    let source = FrozenFormRicci::new(spec, p, 0.0, kernel)?;
    let traj = integrate(&source, source.initial_state(), cfg.dt, cfg.t_end, &tol)?;
    let mut res = PointResult {
        rows: Vec::with_capacity(traj.len()),
        flags: Vec::new(),
    };
    for state in &traj {
        let ric = source.ricci(&state.metric, state.t)?;
        let eig = ricci_eigenproblem(&ric, &state.metric, &tol)?;
        if !ricci_to_lyapunov(&eig.lambdas).violations.is_empty() {
            res.flags
                .push("positive_ricci_eigenvalue_encountered".into());
        }
        let n = state.metric.nrows();
        let g = |i: usize| if i < n { state.metric[(i, i)] } else { 0.0 };
        let l = |i: usize| eig.lambdas.get(i).copied().unwrap_or(0.0);
        res.rows
            .push(vec![state.t, g(0), g(1), g(2), l(0), l(1), l(2)]);
    }
    res.flags.dedup();
    Ok(res)
}

fn lyapunov_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let tol = cfg.tolerances();
    let (theta, clamped) = clamp_theta(cfg.theta);
    let flow = cfg.flow();
    let spec = tube_lyapunov_spectrum(&flow, cfg.r, theta, &tol)?;
    let stretch = spec.map(|l| stretching_from_exponent(l, cfg.t_end));
    let mut res = PointResult::one(vec![
        theta,
        cfg.r,
        spec[0],
        spec[1],
        spec[2],
        stretch[0],
        stretch[1],
        stretch[2],
        bool_val(flow.outside_dynamo_regime(cfg.r, cfg.s)),
    ]);
    if clamped {
        res.flags.push(FLAG_THETA_CLAMPED.into());
    }
    Ok(res)
}

fn dynamo_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let tol = cfg.tolerances();
    let (theta, clamped) = clamp_theta(cfg.theta);
    let flow = cfg.flow();
    let v = dynamo_constraint(&flow, theta, cfg.r, &tol)?;
    let g = field_growth(&flow, theta, cfg.r, cfg.t_end, &tol)?;
    let mut res = PointResult::one(vec![
        theta,
        cfg.r,
        v.margin,
        bool_val(v.satisfied),
        v.spectrum_margin,
        bool_val(v.spectrum_satisfied),
        bool_val(v.stretch_ok),
        bool_val(v.contract_ok),
        g.rate_theta,
        g.rate_s,
        g.amplification_theta,
        g.amplification_s,
        bool_val(flow.outside_dynamo_regime(cfg.r, cfg.s)),
    ]);
    if clamped {
        res.flags.push(FLAG_THETA_CLAMPED.into());
    }
    Ok(res)
}

fn cl_point(cfg: &RunConfig) -> anyhow::Result<PointResult> {
    let eps = if cfg.eps_from_rem {
        eps_from_reynolds(cfg.rem)?
    } else {
        cfg.eps
    };
    let lam = chicone_latushkin_lambda(eps, cfg.kappa_cl)?;
    Ok(PointResult::one(vec![eps, cfg.kappa_cl, lam.re, lam.im]))
}

/// Renders the reference tube sweep twice and compares the bytes.
pub fn tube_determinism() -> CriterionOutcome {
    let sweeps = vec![
        Sweep {
            var: "s".into(),
            start: 0.0,
            stop: 1.0,
            count: 4,
        },
        Sweep {
            var: "theta".into(),
            start: 0.0,
            stop: 2.0 * PI,
            count: 9,
        },
    ];
    let cfg = RunConfig {
        sweeps,
        ..RunConfig::default()
    };
    let res = (|| -> anyhow::Result<(bool, String)> {
        let a = run_table(Command::Tube, &cfg)?.to_csv();
        let b = run_table(Command::Tube, &cfg)?.to_csv();
        Ok((a == b, format!("{} bytes, identical = {}", a.len(), a == b)))
    })();
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e:#}")));
    CriterionOutcome {
        id: 10,
        title: "tube output determinism",
        passed,
        detail,
    }
}

/// Every acceptance check; the process exit status is derived from these.
pub fn verify() -> Vec<CriterionOutcome> {
    let mut all = run_core_criteria();
    all.push(tube_determinism());
    all
}

pub fn write_table(table: &ResultTable, cfg: &RunConfig) -> anyhow::Result<()> {
    let path = cfg.output_path(&table.command);
    table
        .write(cfg.format, path.as_deref())
        .context("writing output")
}
