use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lilypond", version, about = "Lilypond hard-core segment systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Every subcommand; the first five are recorded verbatim in run manifests.
#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Sample a marked Poisson realization.
    Generate(GenerateArgs),
    /// Solve a realization for the segment radii.
    Solve(SolveArgs),
    /// Append the contact structure and identity checks to a solution.
    Analyze(AnalyzeArgs),
    /// Draw a solution as SVG.
    Render(RenderArgs),
    /// Monte Carlo estimators.
    Mc(McArgs),
    /// Re-run a manifest and compare the outputs byte for byte.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Rectangle `[0,W]×[0,H]`, written `WxH`.
    #[arg(long, conflicts_with = "disk")]
    pub window: Option<String>,
    /// Disk of this radius around the origin.
    #[arg(long)]
    pub disk: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the K points nearest the origin and pin a germ with θ = 0 there.
    #[arg(long, value_name = "K")]
    pub n_closest: Option<usize>,
    /// Two-atom marks `THETA1,THETA2,P` instead of uniform directions.
    #[arg(long, value_name = "T1,T2,P")]
    pub two_atom: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Fixed,
    Chain,
    Oracle,
    /// Run all three and require agreement; writes the chain solution.
    All,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub model: u8,
    #[arg(long, value_enum, default_value_t = MethodArg::Chain)]
    pub method: MethodArg,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Restrict the identity checks to germs certified this far inside the window.
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighlightArg {
    Cycles,
    Doublets,
    None,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = HighlightArg::None)]
    pub highlight: HighlightArg,
    /// Clip strokes to the sampling window.
    #[arg(long)]
    pub clip: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub model: u8,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value = "30x30")]
    pub window: String,
    #[arg(long, default_value_t = 8.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Any of nu, varpi, mu, p_finite, tail, gaussian, trend.
    #[arg(long, value_delimiter = ',', default_value = "nu,varpi,mu,p_finite")]
    pub estimators: Vec<String>,
    /// Window side lengths for the trend estimator.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<f64>,
    /// Pinned-origin samples for the tail estimators.
    #[arg(long, default_value_t = 10_000)]
    pub tail_samples: usize,
    /// Points added around the pinned origin.
    #[arg(long, default_value_t = 200)]
    pub n_closest: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write the outputs here (same file names) instead of their recorded paths.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
