use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gasket_geometry::Family;

/// Flag names and output schemas are frozen in docs/interface.md (v1).
#[derive(Parser, Debug)]
#[command(
    name = "gasket-lab",
    version,
    about = "Laboratory for diffusion scaling on fractal approximation graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Renormalization-factor cache file; the GASKET_LAB_CACHE environment
    /// variable takes precedence
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sg,
    Vs2d,
    Vs3d,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Sg => Family::Sg,
            FamilyArg::Vs2d => Family::Vs2d,
            FamilyArg::Vs3d => Family::Vs3d,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponent table (N, rho, d_f, d_w, d_s, tau) over a side sweep
    Exponents(ExponentsArgs),
    /// Effective-resistance reports: corner resistance, rho routes, diameter
    Resistance(ResistanceArgs),
    /// Crossing-time concentration experiment (Monte Carlo)
    Simulate(SimulateArgs),
    /// Probe-density kernel estimates and reference comparison
    Kernel(KernelArgs),
    /// Vicsek renormalization fixed points
    Vicsek(VicsekArgs),
    /// Named verification suites; exit code 0 iff every gate passes
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ExponentsArgs {
    /// Ambient dimension d
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sg)]
    pub family: FamilyArg,
    /// Single side l
    #[arg(long, conflicts_with = "side_range")]
    pub side: Option<u32>,
    /// Inclusive side sweep A..B
    #[arg(long, value_parser = parse_range)]
    pub side_range: Option<(u32, u32)>,
}

#[derive(Args, Debug)]
pub struct ResistanceArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    #[arg(long)]
    pub side: u32,
    /// Approximation level m
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    /// Also compute the resistance diameter and its geometric bound
    #[arg(long)]
    pub diameter: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    #[arg(long)]
    pub side: u32,
    /// Approximation level m (>= 2)
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    /// Horizon T: crossings are tracked up to floor(l^2 T)
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    #[arg(long)]
    pub side: u32,
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    /// Rescaled times, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5])]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// JSON probe-set file overriding the default probe family
    #[arg(long)]
    pub probes: Option<PathBuf>,
    /// Fine lattice side for the reference kernel and normalizers
    #[arg(long)]
    pub reference_side: Option<u32>,
    /// Emit the comparison against the dense-lattice reference instead of the
    /// probe-density matrix
    #[arg(long)]
    pub compare: bool,
}

#[derive(Args, Debug)]
pub struct VicsekArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub side: u32,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: u32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite: identities | vicsek | kernels | all
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s}"))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let b: u32 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}
