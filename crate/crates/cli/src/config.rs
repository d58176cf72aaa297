//! Resolved run configurations and their manifests.
//!
//! Resolution order: built-in defaults, then `--config` (a plain config object
//! or a manifest), then command-line flags.

use std::path::Path;

use confnet_core::geometry::{cube_prism, house_prism, RightPrism};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Command, DomainKind, Format, ModelName, Process};
use crate::error::CliError;
use crate::lists::grid;

/// A preset name, a path to a prism file, or an inline prism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrismSpec {
    Named(String),
    Inline(RightPrism),
}

impl PrismSpec {
    /// Presets stay named; files are read and stored inline so manifests are self-contained.
    pub fn resolve(self) -> Result<Self, CliError> {
        match self {
            PrismSpec::Named(name) if name == "house" || name == "cube" => Ok(PrismSpec::Named(name)),
            PrismSpec::Named(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Usage(format!("cannot read prism file '{path}': {e}")))?;
                let prism: RightPrism = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("prism file '{path}': {e}")))?;
                Ok(PrismSpec::Inline(prism))
            }
            inline => Ok(inline),
        }
    }

    pub fn build(&self, l: f64) -> Result<RightPrism, CliError> {
        match self {
            PrismSpec::Named(n) if n == "house" => Ok(house_prism(l)?),
            PrismSpec::Named(n) if n == "cube" => Ok(cube_prism(l)?),
            PrismSpec::Named(n) => Err(CliError::Usage(format!("unresolved prism '{n}'"))),
            PrismSpec::Inline(p) => Ok(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassConfig {
    pub format: Format,
    pub model: ModelName,
    pub m: Option<Vec<u32>>,
    pub n: Option<Vec<u32>>,
    pub d: u32,
    pub eta: Vec<f64>,
    pub beta: f64,
    pub radius: f64,
}

impl Default for MassConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            model: ModelName::Simo,
            m: None,
            n: None,
            d: 3,
            eta: vec![2.0, 3.0, 4.0],
            beta: 1.0,
            radius: 1.0,
        }
    }
}

impl MassConfig {
    fn resolve(mut self) -> Result<Self, CliError> {
        let range = |a: u32, b: u32| Some((a..=b).collect::<Vec<_>>());
        match self.model {
            ModelName::Simo | ModelName::Miso => {
                if self.m.is_none() {
                    self.m = range(1, 64);
                }
                self.n = None;
            }
            ModelName::Mimo => {
                if self.m.is_none() {
                    self.m = Some(vec![2]);
                }
                if self.n.is_none() {
                    self.n = range(2, 64);
                }
            }
            ModelName::Siso | ModelName::UnitDisk => {
                self.m = None;
                self.n = None;
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfcConfig {
    pub format: Format,
    pub prism: PrismSpec,
    #[serde(rename = "L")]
    pub l: f64,
    pub model: ModelName,
    pub m: u32,
    pub n: u32,
    pub beta: f64,
    pub eta: f64,
    pub radius: f64,
    pub rho: Vec<f64>,
    pub table: bool,
}

impl Default for PfcConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            prism: PrismSpec::Named("house".into()),
            l: 7.0,
            model: ModelName::Mimo,
            m: 2,
            n: 2,
            beta: 1.0,
            eta: 2.0,
            radius: 1.0,
            rho: grid(0.1, 1.2, 0.02).expect("valid default grid"),
            table: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub format: Format,
    pub seed: u64,
    pub prism: PrismSpec,
    #[serde(rename = "L")]
    pub l: f64,
    pub model: ModelName,
    pub m: u32,
    pub n: u32,
    pub beta: f64,
    pub eta: f64,
    pub radius: f64,
    pub rho: Vec<f64>,
    pub trials: u64,
    pub process: Process,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            seed: 1,
            prism: PrismSpec::Named("house".into()),
            l: 7.0,
            model: ModelName::Mimo,
            m: 2,
            n: 2,
            beta: 1.0,
            eta: 2.0,
            radius: 1.0,
            rho: grid(0.4, 1.0, 0.1).expect("valid default grid"),
            trials: 2000,
            process: Process::Binomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub format: Format,
    pub seed: u64,
    pub domain: DomainKind,
    /// Side of the square domain.
    pub side: f64,
    pub prism: PrismSpec,
    #[serde(rename = "L")]
    pub l: f64,
    pub model: ModelName,
    pub m: u32,
    pub n: u32,
    pub beta: f64,
    pub eta: f64,
    pub radius: f64,
    pub rho: f64,
    pub grid: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            seed: 1,
            domain: DomainKind::Square,
            side: 10.0,
            prism: PrismSpec::Named("house".into()),
            l: 7.0,
            model: ModelName::Siso,
            m: 2,
            n: 2,
            beta: 1.0,
            eta: 2.0,
            radius: 1.0,
            rho: 1.5,
            grid: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub format: Format,
    pub seed: u64,
    pub check: Vec<String>,
    pub perturb: bool,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { format: Format::Csv, seed: 1, check: Vec::new(), perturb: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Mass(MassConfig),
    Pfc(PfcConfig),
    Simulate(SimulateConfig),
    Field(FieldConfig),
    Validate(ValidateConfig),
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Mass(_) => "mass",
            RunConfig::Pfc(_) => "pfc",
            RunConfig::Simulate(_) => "simulate",
            RunConfig::Field(_) => "field",
            RunConfig::Validate(_) => "validate",
        }
    }

    pub fn format(&self) -> Format {
        match self {
            RunConfig::Mass(c) => c.format,
            RunConfig::Pfc(c) => c.format,
            RunConfig::Simulate(c) => c.format,
            RunConfig::Field(c) => c.format,
            RunConfig::Validate(c) => c.format,
        }
    }

    fn to_value(&self) -> Value {
        let v = match self {
            RunConfig::Mass(c) => serde_json::to_value(c),
            RunConfig::Pfc(c) => serde_json::to_value(c),
            RunConfig::Simulate(c) => serde_json::to_value(c),
            RunConfig::Field(c) => serde_json::to_value(c),
            RunConfig::Validate(c) => serde_json::to_value(c),
        };
        v.expect("configs serialize")
    }

    /// Everything needed to rerun: tool version, command and the resolved config.
    pub fn manifest(&self) -> String {
        let mut m = Map::new();
        m.insert("tool".into(), Value::from("confnet"));
        m.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), Value::from(self.command()));
        m.insert("config".into(), self.to_value());
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("manifest serializes");
        text.push('\n');
        text
    }
}

/// Settings from global flags that feed into the command config.
#[derive(Debug, Clone, Copy, Default)]
pub struct GlobalOverrides {
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

/// Contents of a `--config` file: the config object and, for manifests, the command.
#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub config: Map<String, Value>,
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config '{}': {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config '{}' is not valid JSON: {e}", path.display())))?;
    let Value::Object(mut obj) = value else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    if let Some(Value::Object(inner)) = obj.remove("config") {
        let command = match obj.get("command") {
            Some(Value::String(s)) => Some(s.clone()),
            _ => None,
        };
        return Ok(ConfigFile { command, config: inner });
    }
    Ok(ConfigFile { command: None, config: obj })
}

fn overlay(base: &mut Map<String, Value>, top: &Map<String, Value>) {
    for (k, v) in top {
        base.insert(k.clone(), v.clone());
    }
}

fn merge<C: Serialize + DeserializeOwned + Default>(
    file: Option<&ConfigFile>,
    args: Value,
    globals: GlobalOverrides,
) -> Result<C, CliError> {
    let Value::Object(mut merged) = serde_json::to_value(C::default()).expect("defaults serialize") else {
        unreachable!("configs are structs")
    };
    let accepts_seed = merged.contains_key("seed");
    if let Some(f) = file {
        overlay(&mut merged, &f.config);
    }
    if let Value::Object(a) = args {
        overlay(&mut merged, &a);
    }
    if let Some(fmt) = globals.format {
        merged.insert("format".into(), serde_json::to_value(fmt).expect("format serializes"));
    }
    if let (Some(seed), true) = (globals.seed, accepts_seed) {
        merged.insert("seed".into(), Value::from(seed));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
}

fn args_value<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

/// Combine defaults, an optional config file and the parsed command line.
pub fn resolve(
    command: Option<Command>,
    file: Option<&ConfigFile>,
    globals: GlobalOverrides,
) -> Result<RunConfig, CliError> {
    let file_command = file.and_then(|f| f.command.clone());
    let command = match (command, file_command.as_deref()) {
        (Some(c), Some(fc)) if c.name() != fc => {
            return Err(CliError::Usage(format!(
                "manifest was written by '{fc}' but '{}' was requested",
                c.name()
            )))
        }
        (Some(c), _) => c,
        (None, Some(fc)) => default_command(fc)?,
        (None, None) => {
            return Err(CliError::Usage("no command given; use --help for the list of commands".into()))
        }
    };
    Ok(match command {
        Command::Mass(a) => RunConfig::Mass(merge::<MassConfig>(file, args_value(&a), globals)?.resolve()?),
        Command::Pfc(a) => {
            let mut c: PfcConfig = merge(file, args_value(&a), globals)?;
            c.prism = c.prism.resolve()?;
            RunConfig::Pfc(c)
        }
        Command::Simulate(a) => {
            let mut c: SimulateConfig = merge(file, args_value(&a), globals)?;
            c.prism = c.prism.resolve()?;
            RunConfig::Simulate(c)
        }
        Command::Field(a) => {
            let mut v = args_value(&a);
            if let Value::Object(obj) = &mut v {
                if let Some(side) = a.square {
                    obj.insert("domain".into(), Value::from("square"));
                    obj.insert("side".into(), Value::from(side));
                } else if obj.contains_key("prism") && !obj.contains_key("domain") {
                    obj.insert("domain".into(), Value::from("prism"));
                }
            }
            let mut c: FieldConfig = merge(file, v, globals)?;
            c.prism = c.prism.resolve()?;
            RunConfig::Field(c)
        }
        Command::Validate(a) => RunConfig::Validate(merge(file, args_value(&a), globals)?),
    })
}

fn default_command(name: &str) -> Result<Command, CliError> {
    use crate::args::*;
    Ok(match name {
        "mass" => Command::Mass(MassArgs::default()),
        "pfc" => Command::Pfc(PfcArgs::default()),
        "simulate" => Command::Simulate(SimulateArgs::default()),
        "field" => Command::Field(FieldArgs::default()),
        "validate" => Command::Validate(ValidateArgs::default()),
        other => return Err(CliError::Usage(format!("manifest names unknown command '{other}'"))),
    })
}
