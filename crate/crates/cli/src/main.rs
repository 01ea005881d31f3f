mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "rpdp", version, about = "Private graph publication by random projection")]
pub struct Cli {
    /// Worker threads for parallel kernels (results do not depend on it)
    #[arg(long, global = true, env = "RPDP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a synthetic graph
    #[command(subcommand)]
    Gen(GenKind),
    /// Publish A·P + Q for a graph
    Publish(PublishArgs),
    /// Top-k eigenpairs of a graph or left singular pairs of a published matrix
    Eigen(EigenArgs),
    /// Spectral clustering
    Cluster(ClusterArgs),
    /// Principal component centrality scores
    Pcc(PccArgs),
    /// Sweep a parameter grid and report utility metrics
    Evaluate(EvaluateArgs),
    /// Degree histogram of a graph
    DegreeDist(DegreeArgs),
    /// Re-run a command from its manifest and check its outputs match
    Replay(ReplayArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Stochastic block model with planted labels
    Sbm(SbmArgs),
    /// Preferential attachment
    Ba(BaArgs),
    /// Erdős–Rényi G(n, p)
    Er(ErArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SbmArgs {
    /// Comma-separated block sizes
    #[arg(long, value_delimiter = ',', required = true)]
    pub blocks: Vec<usize>,
    #[arg(long)]
    pub p_in: f64,
    #[arg(long)]
    pub p_out: f64,
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Edge-list output
    #[arg(long)]
    pub out: PathBuf,
    /// Planted labels CSV (default: <out>.labels.csv)
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub links: usize,
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ErArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct PublishArgs {
    /// Edge-list input
    pub graph: PathBuf,
    #[arg(long)]
    pub m: usize,
    /// Noise standard deviation (uncalibrated)
    #[arg(long, conflicts_with_all = ["epsilon", "delta"], required_unless_present = "epsilon")]
    pub sigma: Option<f64>,
    /// Privacy budget; σ is calibrated from (ε, δ, n)
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
    /// Projection seed
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Noise seed (default: projection seed + 1)
    #[arg(long)]
    pub noise_seed: Option<u64>,
    /// Treat the edge list as directed arcs to be symmetrized
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Additional CSV export of the matrix
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EigenArgs {
    /// Edge list or published matrix
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Residual tolerance (default 1e-10 for graphs, 1e-8 for published input)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Krylov basis limit for graphs
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Start-vector seed for graphs
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Additional CSV export of the basis
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterArgs {
    /// Edge list, published matrix or basis file
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Graph whose node ids label the output (defaults to the input when it is a graph)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Planted labels CSV; prints NMI against it
    #[arg(long)]
    pub planted: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Evaluation,
    SelfContained,
}

#[derive(Args, Debug, Serialize)]
pub struct PccArgs {
    /// Edge list, published matrix or basis file
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Emit only the t best-ranked nodes, in rank order
    #[arg(long)]
    pub t: Option<usize>,
    /// How published or basis input is scored
    #[arg(long, value_enum, default_value_t = ModeArg::Evaluation)]
    pub mode: ModeArg,
    /// Original graph (required for evaluation mode on non-graph input)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Keep raw score magnitudes
    #[arg(long)]
    pub no_normalize: bool,
    /// Add a rank column
    #[arg(long)]
    pub rank: bool,
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    /// Edge-list input
    pub graph: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [20, 200])]
    pub ms: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0])]
    pub sigmas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    pub ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 100])]
    pub ts: Vec<usize>,
    /// Laplace scales for the LNPP baseline
    #[arg(long, value_delimiter = ',')]
    pub lnpp: Vec<f64>,
    /// Trial seeds
    #[arg(long, value_delimiter = ',', default_values_t = [0])]
    pub seeds: Vec<u64>,
    /// Seed of the original pipeline
    #[arg(long, env = "RPDP_SEED", default_value_t = 0)]
    pub base_seed: u64,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Evaluation)]
    pub pcc_mode: ModeArg,
    #[arg(long)]
    pub no_normalize: bool,
    /// Planted labels CSV; adds NMI against it
    #[arg(long)]
    pub planted: Option<PathBuf>,
    #[arg(long, default_value = "graph")]
    pub dataset: String,
    /// Fill the secs_* columns (reruns then differ in those columns)
    #[arg(long)]
    pub record_timings: bool,
    #[arg(long)]
    pub directed: bool,
    /// CSV report
    #[arg(long)]
    pub out: PathBuf,
    /// JSON-lines report
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DegreeArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let code = match commands::run(cli.command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    };
    if let Some(rss) = commands::peak_rss_bytes() {
        eprintln!("peak_rss_bytes={rss}");
    }
    code
}
