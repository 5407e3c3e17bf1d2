//! Command-line arguments, `--config` JSON files and their resolution into
//! validated per-command configurations.
//!
//! Every flag has a JSON field of the same name (snake_case). Flags override
//! file values; the seed falls back to `APERTURE_FORGE_SEED`, then 0.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use aperture_forge_core::optimizer::{MinSpacing, OptimizerConfig, UpdateRule};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "APERTURE_FORGE_SEED";

#[derive(Debug, Parser)]
#[command(name = "aperture-forge", version, about = "Finite-aperture linear array placement experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum-spacing distribution of random placements: analytic vs Monte-Carlo.
    Spacing(SpacingArgs),
    /// Optimise a placement with projected gradient descent.
    Design(DesignArgs),
    /// Closed-form CRB and γ_max for ULA, scaled-MRA and optimised placements.
    Crb(CrbArgs),
    /// AoA-MSE upper bound across an SNR sweep.
    MseBound(MseBoundArgs),
    /// Synthesise snapshots and estimate the angle on the codebook grid.
    DemoEstimate(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitScheme {
    Mra,
    Ula,
    Random,
    Custom,
}

/// A single port count, an inclusive range `a..b`, or a list `a,b,c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PortsArg {
    One(usize),
    List(Vec<usize>),
    Spec(String),
}

impl FromStr for PortsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let arg = Self::Spec(s.to_string());
        arg.values()?;
        Ok(arg)
    }
}

impl PortsArg {
    pub fn values(&self) -> Result<Vec<usize>, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("invalid port count {t:?}: {e}"))
        };
        let out = match self {
            Self::One(m) => vec![*m],
            Self::List(v) => v.clone(),
            Self::Spec(s) => {
                if let Some((a, b)) = s.split_once("..") {
                    let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
                    if b < a {
                        return Err(format!("empty port range {s:?}"));
                    }
                    (a..=b).collect()
                } else {
                    s.split(',').map(parse).collect::<Result<_, _>>()?
                }
            }
        };
        if out.is_empty() {
            return Err("no port counts given".into());
        }
        Ok(out)
    }
}

/// `auto` or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DMinArg {
    Value(f64),
    Keyword(String),
}

impl FromStr for DMinArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let arg = match s.parse::<f64>() {
            Ok(v) => Self::Value(v),
            Err(_) => Self::Keyword(s.to_string()),
        };
        arg.resolve()?;
        Ok(arg)
    }
}

impl DMinArg {
    pub fn resolve(&self) -> Result<MinSpacing, String> {
        match self {
            Self::Value(v) => Ok(MinSpacing::Fixed(*v)),
            Self::Keyword(k) if k == "auto" => Ok(MinSpacing::Auto),
            Self::Keyword(k) => Err(format!("d_min must be a number or \"auto\", got {k:?}")),
        }
    }
}

fn parse_update_rule(s: &str) -> Result<UpdateRule, String> {
    match s {
        "velocity-momentum" => Ok(UpdateRule::VelocityMomentum),
        "paper-literal" => Ok(UpdateRule::PaperLiteral),
        _ => Err(format!("unknown update rule {s:?} (expected velocity-momentum or paper-literal)")),
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CommonArgs {
    /// JSON file with the same field names as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerArgs {
    /// Gradient step α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Momentum β.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Minimum port spacing in wavelengths, or `auto` for W_max/(M²−1).
    #[arg(long)]
    pub d_min: Option<DMinArg>,
    /// Number of codebook grid angles on [0, π].
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long, value_parser = parse_update_rule)]
    pub update_rule: Option<UpdateRule>,
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    #[arg(long)]
    pub convergence_patience: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SpacingArgs {
    /// Port count `M`, a range `3..16` or a list `3,5,8`.
    #[arg(long)]
    pub ports: Option<PortsArg>,
    /// Aperture W_max in wavelengths; defaults to (M−1)/2 per port count.
    #[arg(long)]
    pub aperture: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignArgs {
    /// Port count `M`, a range or a list; one design per value.
    #[arg(long)]
    pub ports: Option<PortsArg>,
    #[arg(long, value_enum)]
    pub init: Option<InitScheme>,
    /// Placement file for `--init custom`: one position per line.
    #[arg(long)]
    pub placement_file: Option<PathBuf>,
    /// Seed for `--init random`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep every k-th trace record (the last record is always kept).
    #[arg(long)]
    pub log_every: Option<usize>,
    /// Also write the codebook of the optimised placement.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub dump_codebook: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CrbArgs {
    #[arg(long)]
    pub ports: Option<PortsArg>,
    /// Target angle in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Extra placement evaluated as scheme `custom` (single port count only).
    #[arg(long)]
    pub placement_file: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaZPolicy {
    /// σ_z² = σ_n² = P_s/SNR with P_s = 1.
    Noise,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct MseBoundArgs {
    #[arg(long)]
    pub ports: Option<usize>,
    /// `start:stop:step` in dB, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db_range: Option<String>,
    #[arg(long, value_enum)]
    pub sigma_z_policy: Option<SigmaZPolicy>,
    /// Extra placement evaluated as scheme `custom`.
    #[arg(long)]
    pub placement_file: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoPlacement {
    Ula,
    Mra,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoArgs {
    #[arg(long)]
    pub ports: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Drop the noise term entirely.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub noiseless: Option<bool>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long, value_enum)]
    pub placement: Option<DemoPlacement>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the codebook used for the estimate.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub dump_codebook: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// Field-wise `Option::or` for argument structs.
pub trait Merge {
    fn merge(self, fallback: Self) -> Self;
}

macro_rules! impl_merge {
    ($ty:ty { $($field:ident),* } $(nested { $($nested:ident),* })?) => {
        impl Merge for $ty {
            fn merge(self, fallback: Self) -> Self {
                Self {
                    $($field: self.$field.or(fallback.$field),)*
                    $($($nested: self.$nested.merge(fallback.$nested),)*)?
                }
            }
        }
    };
}

impl_merge!(CommonArgs { config, out, format });
impl_merge!(OptimizerArgs { alpha, beta, max_iters, d_min, grid_size, update_rule, convergence_tol, convergence_patience });
impl_merge!(SpacingArgs { ports, aperture, samples, bins, seed } nested { common });
impl_merge!(DesignArgs { ports, init, placement_file, seed, log_every, dump_codebook } nested { optimizer, common });
impl_merge!(CrbArgs { ports, theta_deg, snr_db, snapshots, placement_file } nested { optimizer, common });
impl_merge!(MseBoundArgs { ports, snr_db_range, sigma_z_policy, placement_file } nested { optimizer, common });
impl_merge!(DemoArgs { ports, theta_deg, snr_db, noiseless, snapshots, grid_size, placement, seed, dump_codebook } nested { common });

/// Reads a `--config` file, rejecting keys that no flag accepts.
pub fn load_config_file<T>(path: &Path) -> CliResult<T>
where
    T: Default + Serialize + serde::de::DeserializeOwned,
{
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Config(format!("{}: expected a JSON object", path.display())))?;
    let known = serde_json::to_value(T::default()).expect("argument structs serialise");
    let known = known.as_object().expect("argument structs are objects");
    let mut extra: Vec<&str> = obj
        .keys()
        .filter(|k| !known.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !extra.is_empty() {
        extra.sort_unstable();
        return Err(CliError::Config(format!(
            "{}: unknown field(s) {}",
            path.display(),
            extra.join(", ")
        )));
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merges flags over the `--config` file, if any.
pub fn with_config_file<T>(args: T, config: Option<&Path>) -> CliResult<T>
where
    T: Merge + Default + Serialize + serde::de::DeserializeOwned,
{
    match config {
        Some(path) => Ok(args.merge(load_config_file(path)?)),
        None => Ok(args),
    }
}

pub fn resolve_seed(seed: Option<u64>) -> CliResult<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{SEED_ENV}={v:?} is not a valid seed: {e}"))),
        Err(_) => Ok(0),
    }
}

pub fn resolve_ports(ports: Option<&PortsArg>, default: &[usize]) -> CliResult<Vec<usize>> {
    let values = match ports {
        Some(p) => p.values().map_err(CliError::Config)?,
        None => default.to_vec(),
    };
    if let Some(&m) = values.iter().find(|&&m| m < 2) {
        return Err(CliError::Config(format!("port count must be at least 2, got {m}")));
    }
    Ok(values)
}

pub fn resolve_optimizer(args: &OptimizerArgs) -> CliResult<OptimizerConfig> {
    let defaults = OptimizerConfig::default();
    let d_min = match &args.d_min {
        Some(d) => d.resolve().map_err(CliError::Config)?,
        None => defaults.d_min,
    };
    let config = OptimizerConfig {
        step_alpha: args.alpha.unwrap_or(defaults.step_alpha),
        momentum_beta: args.beta.unwrap_or(defaults.momentum_beta),
        max_iters: args.max_iters.unwrap_or(defaults.max_iters),
        d_min,
        grid_size: args.grid_size.unwrap_or(defaults.grid_size),
        update_rule: args.update_rule.unwrap_or(defaults.update_rule),
        convergence_tol: args.convergence_tol.unwrap_or(defaults.convergence_tol),
        convergence_patience: args.convergence_patience.unwrap_or(defaults.convergence_patience),
        eig_tol: defaults.eig_tol,
    };
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

/// Parses `start:stop:step` (inclusive, dB).
pub fn parse_snr_range(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Config(format!("SNR range must be start:stop:step, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ports_forms() {
        assert_eq!("3..16".parse::<PortsArg>().unwrap().values().unwrap().len(), 14);
        assert_eq!("5".parse::<PortsArg>().unwrap().values().unwrap(), vec![5]);
        assert_eq!("5,9,11".parse::<PortsArg>().unwrap().values().unwrap(), vec![5, 9, 11]);
        assert!("9..3".parse::<PortsArg>().is_err());
        assert!("x".parse::<PortsArg>().is_err());
        let json: PortsArg = serde_json::from_str("[3, 5]").unwrap();
        assert_eq!(json.values().unwrap(), vec![3, 5]);
        let json: PortsArg = serde_json::from_str("8").unwrap();
        assert_eq!(json.values().unwrap(), vec![8]);
    }

    #[test]
    fn snr_range() {
        let v = parse_snr_range("-10:20:2").unwrap();
        assert_eq!(v.len(), 16);
        assert_eq!(v[0], -10.0);
        assert_eq!(v[15], 20.0);
        assert!(parse_snr_range("1:0:1").is_err());
        assert!(parse_snr_range("1:2").is_err());
    }

    #[test]
    fn d_min_forms() {
        assert_eq!("auto".parse::<DMinArg>().unwrap().resolve().unwrap(), MinSpacing::Auto);
        assert_eq!("0.1".parse::<DMinArg>().unwrap().resolve().unwrap(), MinSpacing::Fixed(0.1));
        assert!("big".parse::<DMinArg>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let flags = SpacingArgs {
            samples: Some(10),
            ..Default::default()
        };
        let file = SpacingArgs {
            samples: Some(99),
            bins: Some(7),
            ..Default::default()
        };
        let merged = flags.merge(file);
        assert_eq!(merged.samples, Some(10));
        assert_eq!(merged.bins, Some(7));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = std::env::temp_dir().join(format!("af-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("good.json");
        std::fs::write(&good, r#"{"ports": "3..5", "samples": 10, "out": "x", "format": "json"}"#).unwrap();
        let args: SpacingArgs = load_config_file(&good).unwrap();
        assert_eq!(args.samples, Some(10));
        assert_eq!(args.common.format, Some(OutputFormat::Json));
        let bad = dir.join("bad.json");
        std::fs::write(&bad, r#"{"sample": 10}"#).unwrap();
        assert!(matches!(load_config_file::<SpacingArgs>(&bad), Err(CliError::Config(_))));
        let design = dir.join("design.json");
        std::fs::write(&design, r#"{"ports": 5, "alpha": 0.001, "d_min": "auto", "update_rule": "paper-literal"}"#).unwrap();
        let args: DesignArgs = load_config_file(&design).unwrap();
        assert_eq!(args.optimizer.update_rule, Some(UpdateRule::PaperLiteral));
        std::fs::remove_dir_all(&dir).ok();
    }
}
