use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use qsdc_core::adversary::AttackStrategy;
use qsdc_core::analysis::{DetectionOptions, NodeBudget};
use qsdc_core::protocol::{DetectionPredicate, EncodeTarget, Message, OpPolicy, SessionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Session,
    Detect,
    Leakage,
    Identities,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("no mode given (expected session, detect, leakage, identities or sweep)")]
    MissingMode,
    #[error("mode given twice: `{0:?}` and `{1:?}`")]
    ConflictingMode(Mode, Mode),
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("{0} is required in {1:?} mode")]
    Missing(&'static str, Mode),
    #[error("{0}")]
    Invalid(String),
    #[error("give either bits or text, not both")]
    BitsAndText,
    #[error("trials must be at least 1")]
    ZeroTrials,
}

/// Every run parameter; the same schema serves flags and the TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub n_groups: Option<usize>,
    pub n_checking: Option<usize>,
    /// Binary, or hex with a `0x` prefix.
    pub bits: Option<String>,
    pub text: Option<String>,
    pub strategy: Option<String>,
    pub predicate: Option<String>,
    pub op_weights: Option<[f64; 4]>,
    pub encode_target: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: RunConfig) -> RunConfig {
        RunConfig {
            mode: over.mode.or(self.mode),
            n_groups: over.n_groups.or(self.n_groups),
            n_checking: over.n_checking.or(self.n_checking),
            bits: over.bits.or(self.bits),
            text: over.text.or(self.text),
            strategy: over.strategy.or(self.strategy),
            predicate: over.predicate.or(self.predicate),
            op_weights: over.op_weights.or(self.op_weights),
            encode_target: over.encode_target.or(self.encode_target),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qsdc", version, about = "Entanglement-swapping secure direct communication simulator")]
pub struct Cli {
    /// session, detect, leakage, identities or sweep
    #[arg(value_enum)]
    pub mode: Option<Mode>,
    #[arg(long = "mode", value_enum, id = "mode_flag")]
    pub mode_flag: Option<Mode>,
    /// TOML file with the same keys as the flags (snake_case); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_groups: Option<usize>,
    #[arg(long)]
    pub n_checking: Option<usize>,
    /// Message as binary ("0110") or hex ("0x6f").
    #[arg(long)]
    pub bits: Option<String>,
    /// Message as UTF-8 text, eight bits per byte.
    #[arg(long)]
    pub text: Option<String>,
    /// none, measure-resend, replace-after, replace-before, ancilla-passive, ancilla-corrective
    #[arg(long)]
    pub strategy: Option<String>,
    /// announced-op or strict-u0
    #[arg(long)]
    pub predicate: Option<String>,
    /// Checking-group operation weights for u0..u3, e.g. "1,1,1,1".
    #[arg(long, value_delimiter = ',', num_args = 4)]
    pub op_weights: Option<Vec<f64>>,
    /// first or second travel photon of each group
    #[arg(long)]
    pub encode_target: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Cli {
    /// Merges the config file (if any) under the flags.
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let mode = match (self.mode, self.mode_flag) {
            (Some(a), Some(b)) if a != b => return Err(ConfigError::ConflictingMode(a, b)),
            (a, b) => a.or(b),
        };
        let op_weights = self.op_weights.map(|v| [v[0], v[1], v[2], v[3]]);
        let flags = RunConfig {
            mode,
            n_groups: self.n_groups,
            n_checking: self.n_checking,
            bits: self.bits,
            text: self.text,
            strategy: self.strategy,
            predicate: self.predicate,
            op_weights,
            encode_target: self.encode_target,
            trials: self.trials,
            seed: self.seed,
            out: self.out,
            format: self.format,
        };
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overridden_by(flags))
    }
}

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone)]
pub enum Job {
    Session { cfg: SessionConfig, strategy: AttackStrategy },
    Detect { strategy: AttackStrategy, opts: DetectionOptions },
    Leakage { strategy: AttackStrategy, budget: NodeBudget },
    Identities,
    Sweep { opts: DetectionOptions },
}

#[derive(Debug, Clone)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, ConfigError> {
    s.parse().map_err(ConfigError::Invalid)
}

fn parse_target(s: &str) -> Result<EncodeTarget, ConfigError> {
    match s {
        "first" => Ok(EncodeTarget::FirstTravelPhoton),
        "second" => Ok(EncodeTarget::SecondTravelPhoton),
        _ => Err(ConfigError::Invalid(format!("unknown encode target `{s}` (expected first or second)"))),
    }
}

impl RunConfig {
    pub fn resolve(&self, budget: NodeBudget) -> Result<(Job, Output), ConfigError> {
        let mode = self.mode.ok_or(ConfigError::MissingMode)?;
        let output = Output {
            path: self.out.clone(),
            format: self.format.unwrap_or_default(),
        };
        let strategy = || -> Result<AttackStrategy, ConfigError> {
            parse(self.strategy.as_deref().ok_or(ConfigError::Missing("--strategy", mode))?)
        };
        let predicate = self
            .predicate
            .as_deref()
            .map(parse::<DetectionPredicate>)
            .transpose()?
            .unwrap_or_default();
        let policy = match self.op_weights {
            Some(w) => OpPolicy::new(w).map_err(|e| ConfigError::Invalid(e.to_string()))?,
            None => OpPolicy::uniform(),
        };
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        let opts = DetectionOptions {
            predicate,
            policy,
            seed: self.seed,
            trials,
            budget,
        };

        let job = match mode {
            Mode::Session => {
                let message = match (&self.bits, &self.text) {
                    (Some(_), Some(_)) => return Err(ConfigError::BitsAndText),
                    (Some(b), None) => b.parse::<Message>().map_err(ConfigError::Invalid)?,
                    (None, Some(t)) => Message::from_text(t),
                    (None, None) => Message::empty(),
                };
                let n_groups = self.n_groups.ok_or(ConfigError::Missing("--n-groups", mode))?;
                let n_checking = match self.n_checking {
                    Some(c) => c,
                    None => n_groups
                        .checked_sub(message.len() / 2)
                        .ok_or(ConfigError::Missing("--n-checking", mode))?,
                };
                let seed = self.seed.ok_or(ConfigError::Missing("--seed", mode))?;
                let mut cfg = SessionConfig::new(n_groups, n_checking, message);
                cfg.predicate = predicate;
                cfg.checking_op_policy = policy;
                cfg.seed = seed;
                if let Some(t) = &self.encode_target {
                    cfg.encode_target = parse_target(t)?;
                }
                cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Job::Session {
                    cfg,
                    strategy: self.strategy.as_deref().map(parse).transpose()?.unwrap_or(AttackStrategy::None),
                }
            }
            Mode::Detect => Job::Detect {
                strategy: strategy()?,
                opts,
            },
            Mode::Leakage => Job::Leakage {
                strategy: strategy()?,
                budget,
            },
            Mode::Identities => Job::Identities,
            Mode::Sweep => Job::Sweep { opts },
        };
        Ok((job, output))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qsdc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let file: RunConfig = toml::from_str("mode = \"detect\"\nstrategy = \"none\"\nseed = 3\n").unwrap();
        let flags = cli(&["--strategy", "replace-after"]).into_config().unwrap();
        let merged = file.overridden_by(flags);
        assert_eq!(merged.strategy.as_deref(), Some("replace-after"));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.mode, Some(Mode::Detect));
    }

    #[test]
    fn positional_and_flag_mode() {
        assert_eq!(cli(&["sweep"]).into_config().unwrap().mode, Some(Mode::Sweep));
        assert_eq!(cli(&["--mode", "leakage"]).into_config().unwrap().mode, Some(Mode::Leakage));
        assert!(matches!(
            cli(&["sweep", "--mode", "detect"]).into_config(),
            Err(ConfigError::ConflictingMode(..))
        ));
    }

    #[test]
    fn session_requires_seed_and_capacity() {
        let b = NodeBudget::default();
        let no_seed = cli(&["session", "--n-groups", "2", "--bits", "01"]).into_config().unwrap();
        assert!(matches!(no_seed.resolve(b), Err(ConfigError::Missing("--seed", _))));
        let bad = cli(&["session", "--n-groups", "2", "--n-checking", "1", "--bits", "0110", "--seed", "1"])
            .into_config()
            .unwrap();
        assert!(matches!(bad.resolve(b), Err(ConfigError::Invalid(_))));
        let ok = cli(&["session", "--n-groups", "3", "--bits", "0110", "--seed", "1"]).into_config().unwrap();
        match ok.resolve(b).unwrap().0 {
            Job::Session { cfg, .. } => assert_eq!(cfg.n_checking, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        let c = cli(&["detect", "--strategy", "bogus"]).into_config().unwrap();
        assert!(matches!(c.resolve(NodeBudget::default()), Err(ConfigError::Invalid(_))));
        let c = cli(&["detect", "--strategy", "none", "--predicate", "loose"]).into_config().unwrap();
        assert!(matches!(c.resolve(NodeBudget::default()), Err(ConfigError::Invalid(_))));
        assert!(toml::from_str::<RunConfig>("colour = 1").is_err());
    }
}
