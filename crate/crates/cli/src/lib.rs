//! Command-line front end for the multiplicity routes, the Euler table, the
//! form checks and the surface zeta numerics.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "ruelle", version, about = "Multiplicity of the Ruelle zeta singularity at s = 0")]
pub struct Cli {
    /// JSON file with default flag values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record the wall-clock time in the manifest (reports stop being reproducible).
    #[arg(long, global = true)]
    pub timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// m₀ by the form integral, the Euler characteristic ratio, d/2 · χ, or a Betti vector.
    Multiplicity(MultiplicityArgs),
    /// Euler characteristics of compact duals and their geodesic spaces.
    EulerTable(EulerTableArgs),
    /// Exact closed/basic/invariance checks of the secondary forms.
    FormsCheck(FormsCheckArgs),
    /// Enumerate the closed-geodesic length spectrum.
    Spectrum(SpectrumArgs),
    /// Truncated Ruelle/Selberg products and functional-equation factors.
    Zeta(ZetaArgs),
    /// Growth rate fit of the geodesic counting function.
    Entropy(EntropyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    RealHyperbolic,
    ComplexHyperbolic,
    QuaternionicHyperbolic,
    OctonionicHyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Family parameter n (so(n,1), su(n,1), sp(n,1)).
    #[arg(long)]
    pub n: Option<u32>,
    /// Real dimension of the space.
    #[arg(long)]
    pub dim: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct MultiplicityArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Genus of a surface; sets chi = 2 - 2g.
    #[arg(long, conflicts_with = "chi")]
    pub genus: Option<u32>,
    /// Euler characteristic of X.
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<i64>,
    /// Betti numbers b_0..b_{2n+1} of an odd-dimensional X.
    #[arg(long, value_delimiter = ',', conflicts_with = "betti_file")]
    pub betti: Option<Vec<u64>>,
    /// JSON file holding the Betti vector as an array.
    #[arg(long)]
    pub betti_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EulerTableArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Args)]
pub struct FormsCheckArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Run on one thread
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumSource {
    /// Longest reduced word enumerated
    #[arg(long)]
    pub max_word_length: Option<usize>,
    /// Largest geodesic length kept.
    #[arg(long)]
    pub max_length: Option<f64>,
    /// JSON presentation file; the Bolza group when absent.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    /// Previously exported spectrum CSV instead of enumerating.
    #[arg(long, conflicts_with = "presentation")]
    pub spectrum: Option<PathBuf>,
    /// Run on one thread
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
    /// Write the CSV here and print a JSON summary instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZetaKind {
    Ruelle,
    Selberg,
    QuotientCheck,
    RuelleFe,
    SelbergFe,
}

#[derive(Debug, Clone, Args)]
pub struct ZetaArgs {
    /// Complex argument, e.g. 2.5 or 0.3+0.7i.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, value_enum, default_value = "ruelle")]
    pub kind: ZetaKind,
    #[command(flatten)]
    pub source: SpectrumSource,
    /// Cutoff of the N-product in the Selberg zeta function.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Required gap between Re(s) and the entropy estimate.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Entropy for the tail bound instead of the fitted value.
    #[arg(long)]
    pub entropy: Option<f64>,
    /// Genus for the functional-equation factors.
    #[arg(long)]
    pub genus: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
}

pub fn run(cli: &Cli) -> Result<String> {
    let config = config::Config::load(cli.config.as_deref())?;
    let ctx = commands::Context { config, timestamp: cli.timestamp };
    match &cli.command {
        Command::Multiplicity(a) => commands::multiplicity(&ctx, a),
        Command::EulerTable(a) => commands::euler_table(&ctx, a),
        Command::FormsCheck(a) => commands::forms_check(&ctx, a),
        Command::Spectrum(a) => commands::spectrum(&ctx, a),
        Command::Zeta(a) => commands::zeta(&ctx, a),
        Command::Entropy(a) => commands::entropy(&ctx, a),
    }
}
