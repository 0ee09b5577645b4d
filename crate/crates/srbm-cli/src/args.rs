use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "\
Exit codes:
  0   success
  1   compare verdict FAIL, or parameters not of product form
  2   model is not stable
  3   drift has a non-negative coordinate
  64  usage error or unreadable parameter file
  70  numerical failure
  74  output file cannot be written";

#[derive(Debug, Parser)]
#[command(
    name = "srbm",
    version,
    about = "Tail asymptotics of reflected Brownian motion in the quarter plane",
    long_about = "Tail asymptotics of reflected Brownian motion in the quarter plane.\n\n\
        Parameter files hold one `key = value` per line with keys sigma11, sigma12, sigma22, \
        mu1, mu2, r11, r12, r21, r22. `#` starts a comment.",
    after_help = EXIT_CODES
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the existence and stability conditions.
    Validate(ModelArg),
    /// Decay regime and rate along one direction.
    #[command(after_help = "\
Output: a human-readable block followed by one machine line
  machine,<regime>,<rate>,<prefactor exponent or na>,<x;y>|<x;y>...")]
    Classify(ClassifyArgs),
    /// Regimes over an angle grid, as CSV.
    #[command(after_help = "\
CSV columns: alpha,regime,rate,threshold_markers
  alpha              direction in radians, k*pi/(2(n+1)) for k = 1..n
  threshold_markers  ';'-separated names of thresholds in (previous alpha, alpha]
Comment lines `# alpha1=`, `# alpha2=`, `# beta0=` precede the header when defined.")]
    Sweep(SweepArgs),
    /// Pole candidates of the continued boundary transforms, as CSV.
    #[command(after_help = "\
CSV columns: owner,source,orbit_depth,theta1,theta2,rate,order
  owner   phi1 or phi2
  source  theta_star or theta_star_star
  order   pole order, or na when unresolved")]
    Poles(ClassifyArgs),
    /// Fit the product-form density when the parameters allow it.
    ProductForm(ModelArg),
    /// Stationary density by contour integration.
    #[command(after_help = "\
CSV columns: x1,x2,density,imag_residual,panels
  panels  Gauss-Legendre panels used by the two line integrals, as `n1;n2`
With --grid the points are
the cell centres of an n-by-n grid over (0, max]^2.")]
    Density(DensityArgs),
    /// Euler simulation; writes the occupation histogram and local-time rates.
    #[command(after_help = "\
Histogram CSV columns: x1_center,x2_center,density
Local-time CSV columns: face,local_time,rate")]
    Simulate(SimulateArgs),
    /// Analytic rate against simulation and, for product form, quadrature.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Parameter file.
    pub params: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub params: PathBuf,
    /// Direction angle with unit, e.g. `30deg` or `0.5236rad`.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Rotations followed when enumerating pole candidates.
    #[arg(long, default_value_t = 16)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub params: PathBuf,
    /// Number of interior grid angles; at least 2.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    /// Fitted product-form transforms.
    ProductForm,
    /// Constant transforms given by --c.
    Constant,
    /// `c1/(κ2 − θ2)` and `c2/(κ1 − θ1)` given by --c and --kappa.
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AbscissaKind {
    Axis,
    Auto,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    pub params: PathBuf,
    /// Single evaluation point `x1,x2`.
    #[arg(long, value_parser = finite, value_delimiter = ',', conflicts_with = "grid", required_unless_present = "grid")]
    pub at: Option<Vec<f64>>,
    /// Grid size per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Grid extent per axis.
    #[arg(long, value_parser = finite, default_value_t = 3.0)]
    pub max: f64,
    #[arg(long, value_enum, default_value_t = TransformKind::ProductForm)]
    pub transform: TransformKind,
    /// Boundary constants `c1,c2`.
    #[arg(long, value_parser = finite, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    /// Rational poles `kappa1,kappa2`.
    #[arg(long, value_parser = finite, value_delimiter = ',')]
    pub kappa: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = AbscissaKind::Axis)]
    pub abscissa: AbscissaKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_parser = finite, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub replicas: usize,
    #[arg(long, value_parser = finite, default_value_t = 0.05)]
    pub cell: f64,
    #[arg(long, value_parser = finite, default_value_t = 8.0)]
    pub extent: f64,
    #[arg(long, value_parser = finite, default_value_t = 10.0)]
    pub burn_in: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub params: PathBuf,
    /// Recorded time summed over replicas.
    #[arg(long, value_parser = finite, default_value_t = 1e4)]
    pub total_time: f64,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Histogram CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Local-time CSV destination.
    #[arg(long)]
    pub local_time: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub params: PathBuf,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Simulated time summed over replicas.
    #[arg(long, value_parser = finite, default_value_t = 1e5)]
    pub sim_budget: f64,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Relative tolerance for the simulated rate.
    #[arg(long, value_parser = finite, default_value_t = 0.10)]
    pub tolerance: f64,
    /// Radii `lo,hi` of the fitting window along the ray.
    #[arg(long, value_parser = finite, value_delimiter = ',', default_values_t = [0.5, 2.5])]
    pub window: Vec<f64>,
}

fn finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

/// Angles need an explicit `deg` or `rad` suffix.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = if let Some(v) = t.strip_suffix("deg") {
        (v, PI / 180.0)
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, 1.0)
    } else {
        return Err(format!("`{s}` needs a unit suffix, `deg` or `rad`"));
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("`{num}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v * scale)
}
