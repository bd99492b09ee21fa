//! Run configuration: command-line flags over a config file over defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const OUT_DIR_ENV: &str = "QBCH_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "qbch-out";

/// Every setting a command may use. Config files (TOML, or a JSON sidecar
/// from an earlier run) use the same keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    /// Code descriptor JSON; replaces `n`/`delta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<PathBuf>,
    /// `synth` or a circuit file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
    /// Protocol descriptor JSON; replaces `shape`/`perms`/`target`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perms: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logical_checks: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prep_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory_budget: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stratified_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enum_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    /// Fields set in `top` win over those in `self`.
    pub fn overlay(mut self, top: &Settings) -> Settings {
        overlay!(self, top; command, n, delta, code, circuit, protocol, shape, perms, target,
            logical_checks, prep_only, max_w, memory_budget, budget, generators, grid, shots, seed,
            w_max, stratified_k, m_max, enum_budget, alpha, beta, enumerate, out_dir, threads);
        self
    }

    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = Settings {
            n: Some(7),
            shots: Some(10),
            ..Default::default()
        };
        let flags = Settings {
            n: Some(31),
            ..Default::default()
        };
        let s = file.overlay(&flags);
        assert_eq!((s.n, s.shots), (Some(31), Some(10)));
    }

    #[test]
    fn toml_and_json_share_keys() {
        let t: Settings = toml::from_str("n = 31\ndelta = 5\ngrid = [0.001]\n").unwrap();
        let j: Settings = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, j);
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
    }
}
