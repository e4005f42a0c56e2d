//! Run configuration: TOML file, command-line flags and defaults, merged in
//! that order of precedence (flags win).

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ricci_dynamo::flux_tube::{FlowField, TubeMode, TubeParams};
use ricci_dynamo::profile::Profile;
use ricci_dynamo::Tolerances;
use serde::{Deserialize, Serialize};

use crate::cli::CommonArgs;

pub const OUT_DIR_ENV: &str = "RICCI_DYNAMO_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Thin,
    Thick,
}

/// Metric family used by `curvature` and `ricci-flow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    /// 3-d tube metric at `(r, θ, s)`.
    Tube,
    /// Tube surface `r = r0` at `(θ, s)`.
    Surface,
    /// Unit round sphere at `(θ, s)` read as (polar, azimuth).
    Sphere,
    /// Polar plane at `(r, θ)`.
    Polar,
}

/// Scalar parameters that can be swept.
pub const SWEEPABLE: &[&str] = &[
    "kappa0", "tau0", "r0", "theta", "r", "s", "vr", "vtheta", "vs", "omega1", "eps", "rem",
    "kappa", "t_end", "dt",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub var: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    /// `var=start:stop:count`.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let (var, range) = text
            .split_once('=')
            .with_context(|| format!("sweep `{text}`: expected var=start:stop:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            bail!("sweep `{text}`: expected var=start:stop:count");
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("sweep `{text}`: `{s}` is not a number"))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .with_context(|| format!("sweep `{text}`: `{}` is not a count", parts[2]))?;
        let sweep = Sweep {
            var: var.trim().to_string(),
            start: num(parts[0])?,
            stop: num(parts[1])?,
            count,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !SWEEPABLE.contains(&self.var.as_str()) {
            bail!(
                "sweep variable `{}` is not one of {}",
                self.var,
                SWEEPABLE.join(", ")
            );
        }
        if self.count == 0 {
            bail!("sweep `{}`: count must be at least 1", self.var);
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            bail!("sweep `{}`: bounds must be finite", self.var);
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        ricci_dynamo::criteria::linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub first_step: Option<f64>,
    pub second_step: Option<f64>,
    pub degenerate_eig_ratio: Option<f64>,
    pub tangent_cos_min: Option<f64>,
    pub quadrature_rel: Option<f64>,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kappa0: Option<f64>,
    pub kappa_table: Option<Vec<[f64; 2]>>,
    pub tau0: Option<f64>,
    pub tau_table: Option<Vec<[f64; 2]>>,
    pub r0: Option<f64>,
    pub mode: Option<Mode>,
    pub vr: Option<f64>,
    pub vtheta: Option<f64>,
    pub vs: Option<f64>,
    pub omega1: Option<f64>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub rem: Option<f64>,
    pub eps_from_rem: Option<bool>,
    pub kappa: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub metric: Option<MetricChoice>,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// A curve profile as given by the user: constant or `(s, value)` samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProfileInput {
    Constant(f64),
    Table(Vec<[f64; 2]>),
}

impl ProfileInput {
    fn build(&self) -> anyhow::Result<Profile> {
        Ok(match self {
            ProfileInput::Constant(c) => Profile::Constant(*c),
            ProfileInput::Table(rows) => {
                let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
                Profile::table(&pairs)?
            }
        })
    }
}

/// Effective configuration after merging; echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub kappa: ProfileInput,
    pub tau: ProfileInput,
    pub r0: f64,
    pub mode: Mode,
    pub vr: f64,
    pub vtheta: f64,
    pub vs: f64,
    pub omega1: f64,
    pub theta: f64,
    pub r: f64,
    pub s: f64,
    pub eps: f64,
    pub rem: f64,
    pub eps_from_rem: bool,
    pub kappa_cl: f64,
    pub t_end: f64,
    pub dt: f64,
    pub metric: Option<MetricChoice>,
    pub sweeps: Vec<Sweep>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub tolerances: ToleranceEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceEcho {
    pub first_step: f64,
    pub second_step: f64,
    pub degenerate_eig_ratio: f64,
    pub tangent_cos_min: f64,
    pub quadrature_rel: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            kappa: ProfileInput::Constant(1.0),
            tau: ProfileInput::Constant(0.0),
            r0: 0.1,
            mode: Mode::Thin,
            vr: 0.0,
            vtheta: 0.0,
            vs: 0.0,
            omega1: 0.0,
            theta: 0.0,
            r: 0.05,
            s: 0.0,
            eps: 0.0,
            rem: 10.0,
            eps_from_rem: false,
            kappa_cl: -1.0,
            t_end: 0.1,
            dt: 1e-3,
            metric: None,
            sweeps: Vec::new(),
            format: Format::Csv,
            out: None,
            tolerances: ToleranceEcho {
                first_step: t.first_step,
                second_step: t.second_step,
                degenerate_eig_ratio: t.degenerate_eig_ratio,
                tangent_cos_min: t.tangent_cos_min,
                quadrature_rel: t.quadrature_rel,
            },
        }
    }
}

fn profile(
    constant: Option<f64>,
    table: Option<Vec<[f64; 2]>>,
    name: &str,
) -> anyhow::Result<Option<ProfileInput>> {
    match (constant, table) {
        (Some(_), Some(_)) => bail!("`{name}0` and `{name}_table` are mutually exclusive"),
        (Some(c), None) => Ok(Some(ProfileInput::Constant(c))),
        (None, Some(t)) => Ok(Some(ProfileInput::Table(t))),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    /// Defaults, overlaid by `file`, overlaid by `flags`.
    pub fn merge(file: FileConfig, flags: &CommonArgs) -> anyhow::Result<Self> {
        let mut c = RunConfig::default();
        macro_rules! take {
            ($($field:ident <- $src:expr),* $(,)?) => {
                $(if let Some(v) = $src { c.$field = v; })*
            };
        }
        if let Some(k) = profile(file.kappa0, file.kappa_table, "kappa")? {
            c.kappa = k;
        }
        if let Some(t) = profile(file.tau0, file.tau_table, "tau")? {
            c.tau = t;
        }
        take!(
            r0 <- file.r0, mode <- file.mode, vr <- file.vr, vtheta <- file.vtheta, vs <- file.vs,
            omega1 <- file.omega1, theta <- file.theta, r <- file.r, s <- file.s, eps <- file.eps,
            rem <- file.rem, eps_from_rem <- file.eps_from_rem, kappa_cl <- file.kappa, t_end <- file.t_end,
            dt <- file.dt, format <- file.output.format,
        );
        c.metric = file.metric;
        c.out = file.output.path;
        c.sweeps = file.sweep;
        let tol = file.tolerances;
        if let Some(v) = tol.first_step {
            c.tolerances.first_step = v;
        }
        if let Some(v) = tol.second_step {
            c.tolerances.second_step = v;
        }
        if let Some(v) = tol.degenerate_eig_ratio {
            c.tolerances.degenerate_eig_ratio = v;
        }
        if let Some(v) = tol.tangent_cos_min {
            c.tolerances.tangent_cos_min = v;
        }
        if let Some(v) = tol.quadrature_rel {
            c.tolerances.quadrature_rel = v;
        }

        if let Some(k) = flags.kappa0 {
            c.kappa = ProfileInput::Constant(k);
        }
        if let Some(t) = flags.tau0 {
            c.tau = ProfileInput::Constant(t);
        }
        take!(
            r0 <- flags.r0, mode <- flags.mode, vr <- flags.vr, vtheta <- flags.vtheta, vs <- flags.vs,
            omega1 <- flags.omega1, theta <- flags.theta, r <- flags.r, s <- flags.s, eps <- flags.eps,
            rem <- flags.rem, kappa_cl <- flags.kappa, t_end <- flags.t_end, dt <- flags.dt, format <- flags.format,
        );
        if flags.eps_from_rem {
            c.eps_from_rem = true;
        }
        if flags.metric.is_some() {
            c.metric = flags.metric;
        }
        if flags.out.is_some() {
            c.out = flags.out.clone();
        }
        if !flags.sweep.is_empty() {
            c.sweeps = flags
                .sweep
                .iter()
                .map(|s| Sweep::parse(s))
                .collect::<anyhow::Result<_>>()?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for s in &self.sweeps {
            s.validate()?;
        }
        let mut seen = Vec::new();
        for s in &self.sweeps {
            if seen.contains(&s.var.as_str()) {
                bail!("variable `{}` is swept twice", s.var);
            }
            seen.push(s.var.as_str());
        }
        if seen.contains(&"kappa0") && matches!(self.kappa, ProfileInput::Table(_)) {
            bail!("cannot sweep `kappa0` when `kappa_table` is given");
        }
        if seen.contains(&"tau0") && matches!(self.tau, ProfileInput::Table(_)) {
            bail!("cannot sweep `tau0` when `tau_table` is given");
        }
        let scalars = [
            ("r0", self.r0),
            ("vr", self.vr),
            ("vtheta", self.vtheta),
            ("vs", self.vs),
            ("omega1", self.omega1),
            ("theta", self.theta),
            ("r", self.r),
            ("s", self.s),
            ("eps", self.eps),
            ("rem", self.rem),
            ("kappa", self.kappa_cl),
            ("t_end", self.t_end),
            ("dt", self.dt),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                bail!("`{name}` must be finite");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("first_step", t.first_step),
            ("second_step", t.second_step),
            ("degenerate_eig_ratio", t.degenerate_eig_ratio),
            ("tangent_cos_min", t.tangent_cos_min),
            ("quadrature_rel", t.quadrature_rel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerance `{name}` must be positive");
            }
        }
        // Table profiles are checked by building them once.
        self.kappa.build()?;
        self.tau.build()?;
        Ok(())
    }

    /// Copy with one swept scalar replaced.
    pub fn with_value(&self, var: &str, v: f64) -> Self {
        let mut c = self.clone();
        match var {
            "kappa0" => c.kappa = ProfileInput::Constant(v),
            "tau0" => c.tau = ProfileInput::Constant(v),
            "r0" => c.r0 = v,
            "theta" => c.theta = v,
            "r" => c.r = v,
            "s" => c.s = v,
            "vr" => c.vr = v,
            "vtheta" => c.vtheta = v,
            "vs" => c.vs = v,
            "omega1" => c.omega1 = v,
            "eps" => c.eps = v,
            "rem" => c.rem = v,
            "kappa" => c.kappa_cl = v,
            "t_end" => c.t_end = v,
            "dt" => c.dt = v,
            other => unreachable!("unvalidated sweep variable {other}"),
        }
        c
    }

    pub fn tube_params(&self) -> anyhow::Result<TubeParams> {
        let params = TubeParams {
            kappa: self.kappa.build()?,
            tau: self.tau.build()?,
            r0: self.r0,
            mode: match self.mode {
                Mode::Thin => TubeMode::Thin,
                Mode::Thick => TubeMode::Thick,
            },
        };
        params.validate()?;
        Ok(params)
    }

    pub fn flow(&self) -> FlowField {
        FlowField::uniform(self.vr, self.vtheta, self.vs, self.omega1)
    }

    pub fn tolerances(&self) -> Tolerances {
        let t = &self.tolerances;
        Tolerances {
            first_step: t.first_step,
            second_step: t.second_step,
            degenerate_eig_ratio: t.degenerate_eig_ratio,
            tangent_cos_min: t.tangent_cos_min,
            quadrature_rel: t.quadrature_rel,
            ..Tolerances::default()
        }
    }

    /// Where output goes: `--out`, else `$RICCI_DYNAMO_OUT_DIR/<command>.<ext>`,
    /// else standard output (`None`).
    pub fn output_path(&self, command: &str) -> Option<PathBuf> {
        if let Some(p) = &self.out {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.{}", self.format.extension())))
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}
