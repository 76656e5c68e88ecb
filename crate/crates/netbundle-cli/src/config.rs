//! JSON configuration schema shared by every subcommand, plus the error
//! type that fixes the process exit codes.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use netbundle_core::comparison::{AffinityModel, Scenario, ServiceParams, TableModel};
use netbundle_core::equilibrium::{EquilibriumModel, SolverConfig};
use netbundle_core::numerics::{
    QuadratureConfig, DEFAULT_ABS_TOL, DEFAULT_CLAMP_EPS, DEFAULT_MAX_SUBDIVISIONS,
};
use netbundle_core::simulation::SimMode;

/// Anything that stops the run. Exit codes: configuration and output
/// problems are 2, solver failures are 3 (table discrepancies are 4 but
/// flow through the normal output path, not this type).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Solver(msg) => write!(f, "solver: {msg}"),
            CliError::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

impl From<netbundle_core::Error> for CliError {
    fn from(err: netbundle_core::Error) -> Self {
        match err {
            netbundle_core::Error::Tolerance { .. } | netbundle_core::Error::MaxIterations { .. } => {
                CliError::Solver(err.to_string())
            }
            _ => CliError::Config(err.to_string()),
        }
    }
}

/// Top-level configuration. `model`, `services`, and `rho` are always
/// required; each subcommand additionally requires its own block.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelName,
    pub services: [ServiceCfg; 2],
    pub rho: f64,
    #[serde(default)]
    pub solver: SolverCfg,
    #[serde(default)]
    pub quad: QuadCfg,
    pub sweep: Option<SweepCfg>,
    pub region_map: Option<RegionMapCfg>,
    pub montecarlo: Option<MonteCarloCfg>,
    pub table: Option<TableCfg>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceCfg {
    pub c: f64,
    pub e: f64,
}

fn default_tol() -> f64 {
    SolverConfig::default().tol
}

fn default_max_iter() -> u64 {
    SolverConfig::default().max_iter
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCfg {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: u64,
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

fn default_abs_tol() -> f64 {
    DEFAULT_ABS_TOL
}

fn default_max_subdivisions() -> u32 {
    DEFAULT_MAX_SUBDIVISIONS
}

fn default_clamp_eps() -> f64 {
    DEFAULT_CLAMP_EPS
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadCfg {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_max_subdivisions")]
    pub max_subdivisions: u32,
    #[serde(default = "default_clamp_eps")]
    pub clamp_eps: f64,
}

impl Default for QuadCfg {
    fn default() -> Self {
        QuadCfg {
            abs_tol: default_abs_tol(),
            max_subdivisions: default_max_subdivisions(),
            clamp_eps: default_clamp_eps(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Rho,
    C1,
    E1,
    C2,
    E2,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Rho => "rho",
            SweepVar::C1 => "c1",
            SweepVar::E1 => "e1",
            SweepVar::C2 => "c2",
            SweepVar::E2 => "e2",
        }
    }

    /// The base scenario with this variable replaced by `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut sc = *base;
        match self {
            SweepVar::Rho => sc.rho = value,
            SweepVar::C1 => sc.s1.c = value,
            SweepVar::E1 => sc.s1.e = value,
            SweepVar::C2 => sc.s2.c = value,
            SweepVar::E2 => sc.s2.e = value,
        }
        sc
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub steps: u32,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionModelName {
    SepCont,
    SepDisc,
    BunPos,
    BunNeg,
    BunInd,
    BunDisc,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionMapCfg {
    pub model: RegionModelName,
    pub c_range: [f64; 2],
    pub e_range: [f64; 2],
    pub resolution: u32,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum SimModeName {
    #[serde(rename = "separate_1")]
    Separate1,
    #[serde(rename = "separate_2")]
    Separate2,
    #[serde(rename = "bundle")]
    Bundle,
}

fn default_n() -> usize {
    100_000
}

fn default_max_rounds() -> u32 {
    10_000
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloCfg {
    pub mode: SimModeName,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u32,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableName {
    PosCorr,
    NegCorr,
    Discrete,
}

impl TableName {
    pub fn name(self) -> &'static str {
        match self {
            TableName::PosCorr => "pos_corr",
            TableName::NegCorr => "neg_corr",
            TableName::Discrete => "discrete",
        }
    }
}

fn default_samples_per_row() -> u32 {
    200
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableCfg {
    pub model: TableName,
    #[serde(default = "default_samples_per_row")]
    pub samples_per_row: u32,
}

/// Parsed configuration together with its raw text, which tabular
/// outputs echo back verbatim as comment lines.
pub struct LoadedConfig {
    pub raw: String,
    pub cfg: Config,
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: Config = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(LoadedConfig { raw, cfg })
}

impl Config {
    pub fn scenario(&self) -> Scenario {
        Scenario {
            s1: ServiceParams {
                c: self.services[0].c,
                e: self.services[0].e,
            },
            s2: ServiceParams {
                c: self.services[1].c,
                e: self.services[1].e,
            },
            model: match self.model {
                ModelName::Continuous => AffinityModel::Continuous,
                ModelName::Discrete => AffinityModel::Discrete,
            },
            rho: self.rho,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
        }
    }

    pub fn quad(&self) -> QuadratureConfig {
        QuadratureConfig {
            abs_tol: self.quad.abs_tol,
            max_subdivisions: self.quad.max_subdivisions,
            clamp_eps: self.quad.clamp_eps,
        }
    }

    pub fn sweep_block(&self) -> Result<&SweepCfg, CliError> {
        self.sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing \"sweep\" block".into()))
    }

    pub fn region_map_block(&self) -> Result<&RegionMapCfg, CliError> {
        self.region_map
            .as_ref()
            .ok_or_else(|| CliError::Config("missing \"region_map\" block".into()))
    }

    pub fn montecarlo_block(&self) -> Result<&MonteCarloCfg, CliError> {
        self.montecarlo
            .as_ref()
            .ok_or_else(|| CliError::Config("missing \"montecarlo\" block".into()))
    }

    pub fn table_block(&self) -> Result<&TableCfg, CliError> {
        self.table
            .as_ref()
            .ok_or_else(|| CliError::Config("missing \"table\" block".into()))
    }

    pub fn table_model(&self, name: TableName) -> TableModel {
        match name {
            TableName::PosCorr => TableModel::PosCorr,
            TableName::NegCorr => TableModel::NegCorr,
            TableName::Discrete => TableModel::Discrete(self.rho),
        }
    }

    pub fn region_model(&self, name: RegionModelName) -> EquilibriumModel {
        match name {
            RegionModelName::SepCont => EquilibriumModel::SeparateContinuous,
            RegionModelName::SepDisc => EquilibriumModel::SeparateDiscrete,
            RegionModelName::BunPos => EquilibriumModel::BundlePosCorr,
            RegionModelName::BunNeg => EquilibriumModel::BundleNegCorr,
            RegionModelName::BunInd => EquilibriumModel::BundleIndep,
            RegionModelName::BunDisc => EquilibriumModel::BundleDiscrete(self.rho),
        }
    }
}

impl SimModeName {
    pub fn to_mode(self) -> SimMode {
        match self {
            SimModeName::Separate1 => SimMode::Separate1,
            SimModeName::Separate2 => SimMode::Separate2,
            SimModeName::Bundle => SimMode::Bundle,
        }
    }
}
