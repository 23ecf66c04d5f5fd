use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rqeom::backends::NoiseScope;
use rqeom::eom::{Method, PoolKind};
use rqeom::lattice::DEFAULT_PATH;

#[derive(Debug, Parser)]
#[command(name = "rqeom", version, about = "Equation-of-motion band structures on simulated noisy qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Excitation energies along a k-path, with exact reference bands.
    Bands(BandsArgs),
    /// Gap deviations under the biased depolarizing channel as the Z bias varies.
    EtaSweep(EtaSweepArgs),
    /// Repeated stochastic runs at one k-point: samples, means, spreads, outliers.
    Trials(TrialsArgs),
    /// Number of observables to measure.
    Count(CountArgs),
    /// Re-run the manifest embedded in an output file and compare.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rqeom,
    Qeom,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rqeom => Method::Rqeom,
            MethodArg::Qeom => Method::Qeom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolArg {
    Full,
    OffDiagonal,
}

impl From<PoolArg> for PoolKind {
    fn from(p: PoolArg) -> Self {
        match p {
            PoolArg::Full => PoolKind::Full,
            PoolArg::OffDiagonal => PoolKind::OffDiagonal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Noisy,
    Shots,
    Hardware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    PerQubit,
    Global,
}

impl From<ScopeArg> for NoiseScope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::PerQubit => NoiseScope::PerQubit,
            ScopeArg::Global => NoiseScope::Global,
        }
    }
}

fn parse_orbitals(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(m @ (1 | 2 | 8)) => Ok(m),
        _ => Err(format!("{s:?} is not one of 1, 2, 8")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// `si`, `gaas` or a TOML parameter file.
    #[arg(long, default_value = "si")]
    pub material: String,
    #[arg(long, value_enum, default_value = "rqeom")]
    pub method: MethodArg,
    /// Number of source orbitals (preset choice).
    #[arg(long, default_value = "2", value_parser = parse_orbitals)]
    pub orbitals: usize,
    /// Explicit source orbital indices 0..7; overrides --orbitals.
    #[arg(long, value_delimiter = ',')]
    pub sources: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "full")]
    pub pool: PoolArg,
    /// Relative metric rank threshold (backend default when omitted).
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    /// Error probability of the depolarizing channel (noisy: 0.05 when
    /// omitted; shots: no channel unless given).
    #[arg(long)]
    pub p: Option<f64>,
    /// Z bias of the channel.
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "per-qubit")]
    pub scope: ScopeArg,
    #[arg(long, default_value_t = rqeom::backends::DEFAULT_SHOTS)]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Device calibration table (`qubit,T1_us,T2_us,freq_GHz,readout_err,p01,p10`).
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// CX error table (`q_a,q_b,err`) for the calibration.
    #[arg(long)]
    pub cx: Option<PathBuf>,
    /// Device qubits standing in for register qubits 0, 1, 2.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub qubits: Vec<usize>,
    /// Add calibrated readout confusion to the shots backend.
    #[arg(long)]
    pub readout: bool,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Comma-separated labels; `A|B` jumps without advancing the axis.
    #[arg(long, default_value = DEFAULT_PATH)]
    pub path: String,
    /// Samples per path segment, endpoints included.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EtaSweepArgs {
    #[arg(long, default_value = "si")]
    pub material: String,
    #[arg(long, value_enum, default_value = "rqeom")]
    pub method: MethodArg,
    /// Source-orbital counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,8", value_parser = parse_orbitals)]
    pub orbitals: Vec<usize>,
    #[arg(long, value_enum, default_value = "full")]
    pub pool: PoolArg,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "per-qubit")]
    pub scope: ScopeArg,
    /// Z-bias grid; 0 to 1 in steps of 0.05 when omitted.
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "L,G,U")]
    pub kpoints: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrialsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// High-symmetry label or `kx,ky,kz` in units of 2π/a.
    #[arg(long, default_value = "G")]
    pub kpoint: String,
    /// Flag samples outside median ± this many IQRs and report filtered means.
    #[arg(long)]
    pub outliers: Option<f64>,
    /// Average degenerate multiplets (3,1,3 pattern).
    #[arg(long)]
    pub group: bool,
    /// JSON statistics; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-sample CSV.
    #[arg(long)]
    pub scatter: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, value_enum, default_value = "rqeom")]
    pub method: MethodArg,
    /// Pool size; derived from --orbitals and --pool when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "2", value_parser = parse_orbitals)]
    pub orbitals: usize,
    #[arg(long, value_enum, default_value = "full")]
    pub pool: PoolArg,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub file: PathBuf,
}
