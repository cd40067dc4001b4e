//! Flag surface of the `delaylab` binary.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "delaylab",
    version,
    about = "Simulate delay differential equations and locate their characteristic roots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate a model and print the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Locate characteristic roots and report a stability verdict as JSON.
    Analyze(AnalyzeArgs),
    /// First delay-induced crossing of x'(t) + a x(t) + b x(t - tau) = 0.
    Hopf(HopfArgs),
    /// Scan a delay range for stability switches.
    Sweep(SweepArgs),
    /// Collapse an exponential-kernel model to its equivalent ODE system.
    Reduce(ReduceArgs),
    /// Apply the model's closed-form stability criterion.
    Check(CheckArgs),
    /// Closed-form oscillation test for x'(t) + a x(t - tau) = 0.
    Oscillation(OscillationArgs),
}

/// Where the model comes from: a built-in name or a JSON model file.
#[derive(Args)]
pub struct ModelSource {
    /// Built-in model name (hutchinson, prey_predator, allee, cooperative,
    /// competition, linear_scalar, damped_secondorder, neutral_example,
    /// cheyne_stokes_linear).
    #[arg(long, value_name = "NAME", conflicts_with = "model_file")]
    pub model: Option<String>,

    /// JSON model file; see the README for the schema.
    #[arg(long, value_name = "PATH")]
    pub model_file: Option<PathBuf>,

    /// Model parameter as key=value; repeatable, overrides file params.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

/// Root-window overrides; unset fields fall back to the model file and then
/// to the standard window [-5, 1] x [0, 50].
#[derive(Args)]
pub struct WindowArgs {
    /// Left edge of the root search window (real part).
    #[arg(long, value_name = "RE", allow_negative_numbers = true)]
    pub re_min: Option<f64>,

    /// Right edge of the root search window (real part).
    #[arg(long, value_name = "RE", allow_negative_numbers = true)]
    pub re_max: Option<f64>,

    /// Top edge of the window; roots are mirrored across the real axis.
    #[arg(long, value_name = "IM", allow_negative_numbers = true)]
    pub im_max: Option<f64>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: ModelSource,

    /// Integration endpoint (overrides the model file; default 50).
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t_end: Option<f64>,

    /// Nominal step size (overrides the model file; default 1e-3).
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub step: Option<f64>,

    /// CSV rows: evaluation points uniformly spaced on [0, t_end]
    /// (default 1001).
    #[arg(long, value_name = "N")]
    pub output_points: Option<usize>,

    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: ModelSource,

    #[command(flatten)]
    pub window: WindowArgs,

    /// Index into the model's steady-state list (default: the last entry
    /// with all components positive, else the last listed).
    #[arg(long, value_name = "IDX")]
    pub steady_state: Option<usize>,

    /// Write the JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct HopfArgs {
    /// Instantaneous coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,

    /// Delayed coefficient; a crossing needs b > a >= 0.
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,

    /// How many crossing delays to list.
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub family: usize,

    /// Write the JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: ModelSource,

    #[command(flatten)]
    pub window: WindowArgs,

    /// Named-model parameter swept over the range (default: tau).
    #[arg(long, value_name = "KEY")]
    pub vary: Option<String>,

    /// Inline linear models: index of the delayed block whose tau is swept.
    #[arg(long, value_name = "IDX")]
    pub vary_delay: Option<usize>,

    /// Lower end of the swept range.
    #[arg(long, value_name = "T", default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau_min: f64,

    /// Upper end of the swept range.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub tau_max: f64,

    /// Grid points across [tau_min, tau_max].
    #[arg(long, value_name = "N", default_value_t = 101)]
    pub grid: usize,

    /// Steady-state index for linearized models (default as in analyze).
    #[arg(long, value_name = "IDX")]
    pub steady_state: Option<usize>,

    /// CSV destination (default stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Switch-event JSON destination (default stdout, after the CSV).
    #[arg(long, value_name = "PATH")]
    pub events_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReduceArgs {
    /// JSON model file with an inline lv_distributed model.
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,

    /// Write the reduced model file here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: ModelSource,

    /// Competition test only: probe box corner as "x1,x2" (default: 3x the
    /// largest equilibrium per component).
    #[arg(long, value_name = "X1,X2")]
    pub probe_box: Option<String>,

    /// Write the JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct OscillationArgs {
    /// Feedback gain; the equation is x'(t) + a x(t - tau) = 0.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,

    /// Delay.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: f64,

    /// Write the JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
