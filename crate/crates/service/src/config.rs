use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use fable_core::ids::AssessorId;
use serde::Deserialize;

use crate::api::Auth;

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid listen address {0:?}")]
    Addr(String),
    #[error("token for assessor {0} is empty")]
    EmptyToken(String),
    #[error("token listed twice")]
    DuplicateToken,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    listen: Option<String>,
    #[serde(default)]
    data_dir: Option<PathBuf>,
    #[serde(default)]
    questionnaire: Option<PathBuf>,
    #[serde(default)]
    ui_dir: Option<PathBuf>,
    #[serde(default)]
    tokens: Vec<TokenBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenBinding {
    pub token: String,
    pub assessor_id: String,
}

/// Server settings. Relative paths in a config file resolve against the
/// file's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    pub questionnaire: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
    pub tokens: Vec<TokenBinding>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: DEFAULT_ADDR.parse().expect("default address"),
            data_dir: PathBuf::from("fable-data"),
            questionnaire: None,
            ui_dir: None,
            tokens: Vec::new(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str, base: &Path) -> Result<Config, ConfigError> {
        let file: FileConfig = toml::from_str(text)?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let mut config = Config::default();
        if let Some(addr) = file.listen {
            config.listen = addr.parse().map_err(|_| ConfigError::Addr(addr))?;
        }
        if let Some(dir) = file.data_dir {
            config.data_dir = resolve(dir);
        }
        config.questionnaire = file.questionnaire.map(resolve);
        config.ui_dir = file.ui_dir.map(resolve);
        config.tokens = file.tokens;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Config::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Applies `FABLE_ADDR` and `FABLE_DATA_DIR` when set.
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<Config, ConfigError> {
        if let Some(addr) = lookup("FABLE_ADDR") {
            self.listen = addr.parse().map_err(|_| ConfigError::Addr(addr))?;
        }
        if let Some(dir) = lookup("FABLE_DATA_DIR") {
            self.data_dir = PathBuf::from(dir);
        }
        Ok(self)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let mut seen = std::collections::HashSet::new();
        for t in &self.tokens {
            if t.token.trim().is_empty() {
                return Err(ConfigError::EmptyToken(t.assessor_id.clone()));
            }
            if !seen.insert(&t.token) {
                return Err(ConfigError::DuplicateToken);
            }
        }
        Ok(())
    }

    pub fn auth(&self) -> Auth {
        Auth::new(
            self.tokens
                .iter()
                .map(|t| (t.token.clone(), AssessorId::new(t.assessor_id.clone()))),
        )
    }
}
