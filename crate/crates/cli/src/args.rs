//! Command-line surface. Every command option is optional here; missing values
//! come from `--config` or the built-in defaults.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::lists::{IntList, RealList};

#[derive(Debug, Parser)]
#[command(name = "confnet", version, about = "Full-connectivity analytics and simulation for networks confined in convex prisms")]
pub struct Cli {
    /// Data file to write (standard output when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Manifest path. Defaults to `<output>.manifest.json`, or standard error without --output.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// JSON config or a previous manifest. Flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to all cores). Does not affect results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Optional when --config names a manifest, whose command is then replayed.
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Siso,
    Simo,
    Miso,
    Mimo,
    UnitDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    #[default]
    Binomial,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Square,
    Prism,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homogeneous mass M′: closed form, quadrature and large-diversity scaling.
    Mass(MassArgs),
    /// Analytic P_fc and P_out over a density grid, with per-class partial sums.
    Pfc(PfcArgs),
    /// Monte Carlo P_fc over a density grid next to the analytic values.
    Simulate(SimulateArgs),
    /// Connection-probability field of one random node placement.
    Field(FieldArgs),
    /// Run the built-in consistency checks.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mass(_) => "mass",
            Command::Pfc(_) => "pfc",
            Command::Simulate(_) => "simulate",
            Command::Field(_) => "field",
            Command::Validate(_) => "validate",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct MassArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelName>,
    /// Diversity branches (SIMO/MISO sweep) or the short MIMO side, e.g. `1..64`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<IntList>,
    /// MIMO long side, e.g. `2..64`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<IntList>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// Path-loss exponents, e.g. `2,3,4`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<RealList>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Unit-disk radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelName>,
    /// Diversity branches, or the short MIMO side.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// MIMO long side.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Unit-disk radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct PrismArgs {
    /// `house`, `cube`, or a JSON file with `base_vertices` and `height`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prism: Option<String>,
    /// Length scale of the preset prisms.
    #[arg(long = "L", alias = "length")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct PfcArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub prism: PrismArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Densities: values and `start:stop:step` grids, comma separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<RealList>,
    /// Emit the per-feature (measure, solid angle, geometric factor) table instead.
    #[arg(long, action = ArgAction::SetTrue)]
    #[serde(skip_serializing_if = "is_false")]
    pub table: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub prism: PrismArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<RealList>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<Process>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FieldArgs {
    /// Square of this side length (2D domain).
    #[arg(long, conflicts_with = "prism")]
    #[serde(skip)]
    pub square: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub prism: PrismArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Lattice points per axis.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ValidateArgs {
    /// Run only these checks (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub check: Vec<String>,
    /// Swap in a wrong rate constant; the dependent checks must then fail.
    #[arg(long, action = ArgAction::SetTrue)]
    #[serde(skip_serializing_if = "is_false")]
    pub perturb: bool,
}
