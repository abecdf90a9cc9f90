//! Run configuration: optional TOML file, flag overrides, and an effective
//! config echoed into the output directory so every run is reproducible
//! from its artifacts alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::remote::RetryPolicy;
use crate::{jsonl, PipelineError};

/// How step narratives are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ElaboratorMode {
    #[default]
    Template,
    Remote,
}

impl std::str::FromStr for ElaboratorMode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "template" => Ok(ElaboratorMode::Template),
            "remote" => Ok(ElaboratorMode::Remote),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElaboratorConfig {
    pub mode: ElaboratorMode,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub template_id: String,
    pub cache_dir: Option<PathBuf>,
    pub retry: RetryPolicy,
    pub max_in_flight: usize,
    /// Fall back to template mode when the endpoint stays unavailable.
    pub fallback_to_template: bool,
}

impl Default for ElaboratorConfig {
    fn default() -> Self {
        Self {
            mode: ElaboratorMode::Template,
            endpoint: None,
            model: None,
            template_id: "v1".into(),
            cache_dir: None,
            retry: RetryPolicy::default(),
            max_in_flight: 4,
            fallback_to_template: true,
        }
    }
}

impl ElaboratorConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.mode == ElaboratorMode::Remote && self.endpoint.is_none() {
            return Err(PipelineError::config(
                "remote elaboration needs an endpoint (flag --endpoint or config [elaborator] endpoint)",
            ));
        }
        Ok(())
    }
}

/// The effective run configuration after merging file and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub alpha: f64,
    pub elaborator: ElaboratorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 0, // 0 = rayon default
            alpha: 0.1,
            elaborator: ElaboratorConfig::default(),
        }
    }
}

/// The TOML file shape: every key optional, flags win over file values.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub alpha: Option<f64>,
    pub elaborator: Option<FileElaborator>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileElaborator {
    pub mode: Option<ElaboratorMode>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub template_id: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub max_attempts: Option<u32>,
    pub backoff_ms: Option<u64>,
    pub max_in_flight: Option<usize>,
    pub fallback_to_template: Option<bool>,
}

impl RunConfig {
    /// Load the optional file, then apply flag overrides (`Some` wins).
    pub fn resolve(
        file: Option<&Path>,
        seed: Option<u64>,
        workers: Option<usize>,
        alpha: Option<f64>,
    ) -> crate::Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = jsonl::read_string(path)
                .map_err(|e| PipelineError::config(format!("config file: {e}")))?;
            let parsed: FileConfig = toml::from_str(&text)
                .map_err(|e| PipelineError::config(format!("{}: {e}", path.display())))?;
            if let Some(v) = parsed.seed {
                cfg.seed = v;
            }
            if let Some(v) = parsed.workers {
                cfg.workers = v;
            }
            if let Some(v) = parsed.alpha {
                cfg.alpha = v;
            }
            if let Some(e) = parsed.elaborator {
                if let Some(v) = e.mode {
                    cfg.elaborator.mode = v;
                }
                cfg.elaborator.endpoint = e.endpoint.or(cfg.elaborator.endpoint);
                cfg.elaborator.model = e.model.or(cfg.elaborator.model);
                if let Some(v) = e.template_id {
                    cfg.elaborator.template_id = v;
                }
                cfg.elaborator.cache_dir = e.cache_dir.or(cfg.elaborator.cache_dir);
                if let Some(v) = e.max_attempts {
                    cfg.elaborator.retry.max_attempts = v;
                }
                if let Some(v) = e.backoff_ms {
                    cfg.elaborator.retry.backoff_ms = v;
                }
                if let Some(v) = e.max_in_flight {
                    cfg.elaborator.max_in_flight = v;
                }
                if let Some(v) = e.fallback_to_template {
                    cfg.elaborator.fallback_to_template = v;
                }
            }
        }
        if let Some(v) = seed {
            cfg.seed = v;
        }
        if let Some(v) = workers {
            cfg.workers = v;
        }
        if let Some(v) = alpha {
            cfg.alpha = v;
        }
        if !(0.0..=1.0).contains(&cfg.alpha) || cfg.alpha.is_nan() {
            return Err(PipelineError::config(format!(
                "alpha must be in [0, 1], got {}",
                cfg.alpha
            )));
        }
        Ok(cfg)
    }

    /// Write the effective configuration next to the run's outputs.
    pub fn echo(&self, out_dir: &Path) -> crate::Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| PipelineError::config(format!("echoing config: {e}")))?;
        jsonl::write_string(&out_dir.join("run_config.toml"), &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(
            &path,
            "seed = 7\nalpha = 0.5\n[elaborator]\nmode = \"remote\"\nendpoint = \"http://x\"\nmax_attempts = 9\n",
        )
        .unwrap();
        let cfg = RunConfig::resolve(Some(&path), Some(42), None, None).unwrap();
        assert_eq!(cfg.seed, 42); // flag wins
        assert_eq!(cfg.alpha, 0.5); // file value survives
        assert_eq!(cfg.elaborator.mode, ElaboratorMode::Remote);
        assert_eq!(cfg.elaborator.retry.max_attempts, 9);
    }

    #[test]
    fn bad_alpha_is_a_config_error() {
        let err = RunConfig::resolve(None, None, None, Some(1.5)).unwrap_err();
        assert!(matches!(err, PipelineError::Config(_)));
    }

    #[test]
    fn echo_round_trips_through_toml() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        cfg.echo(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("run_config.toml")).unwrap();
        assert!(text.contains("alpha = 0.1"));
    }
}
