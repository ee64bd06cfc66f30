//! Run configuration: defaults, optional key=value config file, and flag
//! overrides. Flags always win; the config file fills in whatever flags
//! leave unset. Service endpoint and credentials may additionally come from
//! the environment.

use std::path::Path;

use vidtok_core::pruner::Variant;
use vidtok_core::stp::StpConfig;
use vidtok_core::ttp::TtpConfig;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tau_s: f64,
    pub tau_t: f64,
    pub tau_large: usize,
    pub patch_size: usize,
    pub max_frames: usize,
    pub merge_adjacent: bool,
    pub variant: Variant,
    pub workers: usize,
    pub seed: u64,
    pub template: String,
    pub service_endpoint: Option<String>,
    pub service_token: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tau_s: StpConfig::DEFAULT_TAU_S,
            tau_t: TtpConfig::DEFAULT_TAU_T,
            tau_large: StpConfig::DEFAULT_TAU_LARGE,
            patch_size: 16,
            max_frames: 100,
            merge_adjacent: false,
            variant: Variant::Both,
            workers: 0,
            seed: 0,
            template: "adversarial-v1".to_string(),
            service_endpoint: None,
            service_token: None,
        }
    }
}

impl RunConfig {
    /// Loads a `key = value` config file. Blank lines and `#` comments are
    /// ignored; unknown keys are rejected so typos surface immediately.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::input(format!(
                    "{}:{}: {key} must be {what}, got `{value}`",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "tau_s" => self.tau_s = value.parse().map_err(|_| bad("a number"))?,
                "tau_t" => self.tau_t = value.parse().map_err(|_| bad("a number"))?,
                "tau_large" => self.tau_large = value.parse().map_err(|_| bad("an integer"))?,
                "patch_size" => self.patch_size = value.parse().map_err(|_| bad("an integer"))?,
                "max_frames" => self.max_frames = value.parse().map_err(|_| bad("an integer"))?,
                "merge_adjacent" => {
                    self.merge_adjacent = value.parse().map_err(|_| bad("true or false"))?
                }
                "variant" => self.variant = parse_variant(value).ok_or_else(|| bad("stp, ttp, or both"))?,
                "workers" => self.workers = value.parse().map_err(|_| bad("an integer"))?,
                "seed" => self.seed = value.parse().map_err(|_| bad("an integer"))?,
                "template" => self.template = value.to_string(),
                "service_endpoint" => self.service_endpoint = Some(value.to_string()),
                "service_token" => self.service_token = Some(value.to_string()),
                _ => {
                    return Err(CliError::input(format!(
                        "{}:{}: unknown config key `{key}`",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    /// Environment overrides for the translation service only.
    pub fn apply_env(&mut self) {
        if let Ok(endpoint) = std::env::var("VIDTOK_SERVICE_ENDPOINT") {
            self.service_endpoint = Some(endpoint);
        }
        if let Ok(token) = std::env::var("VIDTOK_SERVICE_TOKEN") {
            self.service_token = Some(token);
        }
    }

    /// Validates every module config up front, before any work starts.
    pub fn validated(self) -> Result<Self, CliError> {
        StpConfig::new(self.tau_s, self.tau_large)
            .map_err(|e| CliError::input(e.to_string()))?;
        TtpConfig::new(self.tau_t).map_err(|e| CliError::input(e.to_string()))?;
        if self.patch_size == 0 {
            return Err(CliError::input("patch_size must be nonzero"));
        }
        if self.max_frames < 2 {
            return Err(CliError::input("max_frames must be at least 2"));
        }
        Ok(self)
    }

    pub fn stp(&self) -> Option<StpConfig> {
        match self.variant {
            Variant::TtpOnly => None,
            _ => Some(StpConfig {
                tau_s: self.tau_s,
                tau_large: self.tau_large,
            }),
        }
    }

    pub fn ttp(&self) -> Option<TtpConfig> {
        match self.variant {
            Variant::StpOnly => None,
            _ => Some(TtpConfig { tau_t: self.tau_t }),
        }
    }
}

pub fn parse_variant(value: &str) -> Option<Variant> {
    match value {
        "stp" => Some(Variant::StpOnly),
        "ttp" => Some(Variant::TtpOnly),
        "both" => Some(Variant::Both),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_then_flags_precedence_is_callers_job() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# thresholds\ntau_s = 0.5\nvariant = ttp\nworkers=4").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(file.path()).unwrap();
        assert_eq!(cfg.tau_s, 0.5);
        assert_eq!(cfg.variant, Variant::TtpOnly);
        assert_eq!(cfg.workers, 4);
        // Untouched keys keep defaults.
        assert_eq!(cfg.tau_t, TtpConfig::DEFAULT_TAU_T);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "tau_sigma = 0.5").unwrap();
        let mut cfg = RunConfig::default();
        assert!(cfg.load_file(file.path()).is_err());
    }

    #[test]
    fn validation_runs_before_work() {
        let cfg = RunConfig {
            tau_large: 0,
            ..RunConfig::default()
        };
        assert!(cfg.validated().is_err());
        let cfg = RunConfig {
            max_frames: 1,
            ..RunConfig::default()
        };
        assert!(cfg.validated().is_err());
    }

    #[test]
    fn variant_selects_configs() {
        let cfg = RunConfig {
            variant: Variant::StpOnly,
            ..RunConfig::default()
        };
        assert!(cfg.stp().is_some());
        assert!(cfg.ttp().is_none());
    }
}
