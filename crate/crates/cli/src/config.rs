//! Run configuration: command-line flags override a flat `key = value`
//! config file, which overrides built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use indalign_core::{
    BridgeConfig, CompositionPolicy, ConfidenceStrategy, ParseMode, ParseOptions, RelationSetPolicy,
};

/// A single strategy or all four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyChoice {
    One(ConfidenceStrategy),
    All,
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<ConfidenceStrategy> {
        match self {
            StrategyChoice::One(s) => vec![s],
            StrategyChoice::All => ConfidenceStrategy::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(StrategyChoice::All);
        }
        s.parse::<ConfidenceStrategy>()
            .map(StrategyChoice::One)
            .map_err(|_| format!("unknown strategy `{s}` (expected mult, norm, max, min or all)"))
    }
}

/// One layer of settings; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub repo: Option<PathBuf>,
    pub strategy: Option<StrategyChoice>,
    pub relations: Option<RelationSetPolicy>,
    pub sim_threshold: Option<f64>,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub trim: Option<f64>,
    pub mode: Option<ParseMode>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// `self` wins wherever it is set.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            repo: self.repo.or(base.repo),
            strategy: self.strategy.or(base.strategy),
            relations: self.relations.or(base.relations),
            sim_threshold: self.sim_threshold.or(base.sim_threshold),
            lexicon: self.lexicon.or(base.lexicon),
            stopwords: self.stopwords.or(base.stopwords),
            trim: self.trim.or(base.trim),
            mode: self.mode.or(base.mode),
            out: self.out.or(base.out),
        }
    }

    /// Parses a config file body. Relative paths resolve against `base_dir`.
    pub fn parse_config(text: &str, base_dir: &Path) -> Result<Settings, String> {
        let mut s = Settings::default();
        let path = |v: &str| base_dir.join(v);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| format!("config line {}: {msg}", i + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let unit = |v: &str| -> Result<f64, String> {
                let x: f64 = v
                    .parse()
                    .map_err(|_| at(format!("`{v}` is not a number")))?;
                if (0.0..=1.0).contains(&x) {
                    Ok(x)
                } else {
                    Err(at(format!("{x} outside [0,1]")))
                }
            };
            match key {
                "repo" => s.repo = Some(path(value)),
                "strategy" => s.strategy = Some(value.parse().map_err(at)?),
                "relations" => {
                    s.relations = Some(
                        value
                            .parse()
                            .map_err(|e: indalign_core::Error| at(e.to_string()))?,
                    )
                }
                "sim-threshold" => s.sim_threshold = Some(unit(value)?),
                "lexicon" => s.lexicon = Some(path(value)),
                "stopwords" => s.stopwords = Some(path(value)),
                "trim" => s.trim = Some(unit(value)?),
                "mode" => {
                    s.mode = Some(match value {
                        "strict" => ParseMode::Strict,
                        "lenient" => ParseMode::Lenient,
                        other => return Err(at(format!("unknown mode `{other}`"))),
                    })
                }
                "out" => s.out = Some(path(value)),
                other => return Err(at(format!("unknown key `{other}`"))),
            }
        }
        Ok(s)
    }

    pub fn load_config(path: &Path) -> Result<Settings, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Settings::parse_config(&text, base)
            .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Invalid(String),
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub repo: Option<PathBuf>,
    pub strategy: StrategyChoice,
    pub relations: RelationSetPolicy,
    pub sim_threshold: f64,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub trim: Option<f64>,
    pub mode: ParseMode,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(flags: Settings, file: Settings) -> RunConfig {
        let s = flags.over(file);
        let policy = CompositionPolicy::default();
        RunConfig {
            repo: s.repo,
            strategy: s.strategy.unwrap_or(StrategyChoice::One(policy.strategy)),
            relations: s.relations.unwrap_or(policy.relation_set_policy),
            sim_threshold: s
                .sim_threshold
                .unwrap_or(policy.bridge.similarity_threshold),
            lexicon: s.lexicon,
            stopwords: s.stopwords,
            trim: s.trim,
            mode: s.mode.unwrap_or_default(),
            out: s.out,
        }
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            mode: self.mode,
            stopword_file: self.stopwords.clone(),
            ..Default::default()
        }
    }

    /// Policy for one strategy; lexicon matching is on whenever a lexicon is configured.
    pub fn policy(&self, strategy: ConfidenceStrategy) -> CompositionPolicy {
        CompositionPolicy {
            strategy,
            relation_set_policy: self.relations,
            bridge: BridgeConfig {
                similarity_threshold: self.sim_threshold,
                use_lexicon: self.lexicon.is_some(),
                lexicon_path: self.lexicon.clone(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Settings::default(), Settings::default());
        assert_eq!(
            c.strategy,
            StrategyChoice::One(ConfidenceStrategy::Maximization)
        );
        assert_eq!(c.relations, RelationSetPolicy::SingletonOnly);
        assert_eq!(c.sim_threshold, 0.9);
        assert_eq!(c.mode, ParseMode::Strict);
        assert_eq!(c.trim, None);
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = Settings::parse_config(
            "# run settings\nstrategy = min\nsim-threshold = 0.8\ntrim=0.5\nmode = lenient\nlexicon = lex.tsv\n",
            Path::new("/cfg"),
        )
        .unwrap();
        let flags = Settings {
            strategy: Some(StrategyChoice::All),
            ..Default::default()
        };
        let c = RunConfig::resolve(flags, file);
        assert_eq!(c.strategy, StrategyChoice::All);
        assert_eq!(c.sim_threshold, 0.8);
        assert_eq!(c.trim, Some(0.5));
        assert_eq!(c.mode, ParseMode::Lenient);
        assert_eq!(c.lexicon, Some(PathBuf::from("/cfg/lex.tsv")));
        assert!(
            c.policy(ConfidenceStrategy::Maximization)
                .bridge
                .use_lexicon
        );
    }

    #[test]
    fn bad_config_lines() {
        let base = Path::new(".");
        assert!(Settings::parse_config("strategy\n", base)
            .unwrap_err()
            .contains("line 1"));
        assert!(Settings::parse_config("colour = blue\n", base).is_err());
        assert!(Settings::parse_config("trim = 2\n", base).is_err());
        assert!(Settings::parse_config("strategy = avg\n", base).is_err());
        assert!(Settings::parse_config("relations = most\n", base).is_err());
    }

    #[test]
    fn strategy_choice_parse() {
        assert_eq!(
            "all".parse::<StrategyChoice>().unwrap().strategies().len(),
            4
        );
        assert_eq!(
            "norm".parse::<StrategyChoice>().unwrap(),
            StrategyChoice::One(ConfidenceStrategy::Normalization)
        );
        assert!("x".parse::<StrategyChoice>().is_err());
    }
}
