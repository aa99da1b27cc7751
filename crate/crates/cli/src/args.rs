use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "degen",
    version,
    about = "Spectral checks and bilinear stabilization for -(x^a u_x)_x on (0, 1)"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Degeneracy exponent in [0, 3/2).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Number of retained eigenmodes.
    #[arg(long, global = true)]
    pub num: Option<usize>,
    /// Absolute tolerance of adaptive quadrature.
    #[arg(long = "quad-tol", global = true)]
    pub quad_tol: Option<f64>,
    /// CSV output path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bessel zeros, eigenvalues and normalizers.
    Spectrum,
    /// Control operator matrix and its verification report.
    Operator(OperatorArgs),
    /// Hypothesis checks over a grid of exponents.
    Verify(VerifyArgs),
    /// Galerkin trajectory under a constant control.
    Simulate(SimulateArgs),
    /// Windowed moment control toward the ground state.
    Stabilize(StabilizeArgs),
    #[command(name = "bessel-selftest", hide = true)]
    BesselSelftest,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OperatorArgs {
    /// Time parameter of the series check.
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Comma-separated series times.
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Largest index of the first-row comparison.
    #[arg(long = "max-k")]
    pub max_k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InitialArgs {
    /// Initial state such as `phi1+0.05*phi2`.
    #[arg(long, conflicts_with = "coeffs")]
    pub u0: Option<String>,
    /// Initial eigen-coefficients, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub initial: InitialArgs,
    /// Final time of the simulation
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Spacing of the recorded samples
    #[arg(long = "record-dt")]
    pub record_dt: Option<f64>,
    /// Constant control value on [0, horizon].
    #[arg(long, allow_hyphen_values = true)]
    pub control: Option<f64>,
    /// Emit every coefficient instead of the first 8.
    #[arg(long = "full-state")]
    pub full_state: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StabilizeArgs {
    #[command(flatten)]
    pub initial: InitialArgs,
    /// Length of each control window
    #[arg(long = "window-length")]
    pub window_length: Option<f64>,
    /// Number of control windows
    #[arg(long)]
    pub windows: Option<usize>,
    /// Modes controlled on the first window.
    #[arg(long = "first-modes")]
    pub first_modes: Option<usize>,
    /// Extra modes per window.
    #[arg(long)]
    pub growth: Option<usize>,
    /// Admissible distance of the initial state to phi_1.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Radii to sweep along phi_1 + r phi_2, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
}
