use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "schmidt-scope", version, about = "Schmidt decompositions and separability criteria for bipartite states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Density-validation tolerance (Hermiticity, trace, positivity) and Kraus completeness tolerance.
    #[arg(long, global = true, env = "SCHMIDT_SCOPE_TOL")]
    pub tol: Option<f64>,
    /// Singular values at or below this count as zero for the Schmidt rank.
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Detection requires lhs - bound to exceed this margin.
    #[arg(long, global = true)]
    pub decision_tol: Option<f64>,
    /// Skip density-operator validation of input states.
    #[arg(long, global = true)]
    pub no_validate: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt spectrum, rank, purity and symmetric polynomials of a state.
    Schmidt {
        /// State file, or `-` for stdin.
        #[arg(default_value = "-")]
        path: String,
    },
    /// Run separability criteria on a state (or every *.json file of a directory).
    Check {
        /// State file, or `-` for stdin.
        #[arg(conflicts_with = "batch")]
        path: Option<String>,
        /// Comma-separated list: rc, sympoly[:l=L][:rank], theta:T, zhang, filter:LA.json,LB.json
        #[arg(long, default_value = "rc")]
        criteria: String,
        /// Evaluate every *.json file in this directory; reports are ordered by file name.
        #[arg(long)]
        batch: Option<PathBuf>,
        /// Rescale local filters to operator norm 1 instead of rejecting non-contractive ones.
        #[arg(long)]
        normalize_filters: bool,
    },
    /// Analyze a channel file.
    Channel {
        /// Channel file, or `-` for stdin.
        #[arg(default_value = "-")]
        path: String,
        /// Run the entanglement-breaking test with symmetric polynomial degree L.
        #[arg(long, value_name = "L", required_unless_present = "choi", conflicts_with = "choi")]
        eb_check: Option<usize>,
        /// Use the rank-aware bound for --eb-check.
        #[arg(long, requires = "eb_check")]
        rank: bool,
        /// Write the Choi state as a state file (`-` for stdout).
        #[arg(long, value_name = "OUT")]
        choi: Option<String>,
    },
    /// Generate a state or channel file.
    Gen {
        kind: GenKind,
        /// Werner mixing weight or depolarizing probability.
        #[arg(long)]
        p: Option<f64>,
        /// Isotropic fidelity.
        #[arg(long)]
        f: Option<f64>,
        /// Local dimension for bell, isotropic and channel-depolarizing.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        na: usize,
        #[arg(long, default_value_t = 2)]
        nb: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// For `random`: mix this many random product states (a separable sample).
        #[arg(long)]
        terms: Option<usize>,
        /// For `random`: a random pure state.
        #[arg(long, conflicts_with = "terms")]
        pure: bool,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Bell,
    Werner,
    Isotropic,
    Random,
    Product,
    ChannelDepolarizing,
}
