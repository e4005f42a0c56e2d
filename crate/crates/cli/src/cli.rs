use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, MetricChoice, Mode};

#[derive(Debug, Parser)]
#[command(
    name = "ricci-dynamo",
    version,
    about = "Curvature, Ricci flow and dynamo diagnostics for twisted flux tubes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Christoffel/Riemann/Ricci summary of a metric family at grid points.
    Curvature,
    /// Tube surface curvature: kernel against closed forms.
    Tube,
    /// Pointwise Ricci-flow trajectory.
    RicciFlow,
    /// Tube Lyapunov spectrum and stretching factors.
    Lyapunov,
    /// Dynamo inequality verdicts and field growth.
    Dynamo,
    /// Diffusive dynamo eigenvalue over an (eps, kappa) grid.
    ClSpectrum,
    /// Run the acceptance checks.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Tube => "tube",
            Command::RicciFlow => "ricci-flow",
            Command::Lyapunov => "lyapunov",
            Command::Dynamo => "dynamo",
            Command::ClSpectrum => "cl-spectrum",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (default: $RICCI_DYNAMO_OUT_DIR/<command>.<ext>, else stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau0: Option<f64>,
    #[arg(long, global = true)]
    pub r0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Radial coordinate inside the tube.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Arc length along the tube axis.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub vr: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub vs: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub vtheta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega1: Option<f64>,
    /// Resistive coefficient.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Magnetic Reynolds number.
    #[arg(long, global = true)]
    pub rem: Option<f64>,
    /// Take eps = 1/rem.
    #[arg(long, global = true)]
    pub eps_from_rem: bool,
    /// Geodesic-flow curvature for cl-spectrum.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub metric: Option<MetricChoice>,
    /// Inclusive grid `var=start:stop:count`; repeatable, first is outermost.
    #[arg(
        long,
        global = true,
        value_name = "VAR=START:STOP:COUNT",
        allow_hyphen_values = true
    )]
    pub sweep: Vec<String>,
}
