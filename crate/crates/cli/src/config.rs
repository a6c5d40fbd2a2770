//! Run configuration: one JSON document, every field overridable by a
//! CLI flag, flag wins.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, ExitCode};

/// Failure policy names accepted on the flag and in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicyName {
    #[default]
    Abort,
    Quarantine,
}

impl std::str::FromStr for FailurePolicyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abort" => Ok(Self::Abort),
            "quarantine" => Ok(Self::Quarantine),
            other => Err(format!("expected 'abort' or 'quarantine', got {other:?}")),
        }
    }
}

/// The full run configuration after merging file and flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub masks: Option<PathBuf>,
    /// External provider command line, whitespace-split.
    pub provider_cmd: Option<String>,
    pub output: Option<PathBuf>,
    pub preset: Option<String>,
    pub alpha_r: Option<f64>,
    pub alpha_b: Option<f64>,
    pub ismax: Option<bool>,
    pub isfullblur: Option<bool>,
    /// Reference resolution as "WxH".
    pub z_ref: Option<String>,
    pub lambda: Option<f64>,
    pub include_items: Option<bool>,
    pub on_detector_failure: Option<FailurePolicyName>,
    pub workers: Option<usize>,
    pub repeats: Option<usize>,
    pub report_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError {
            code: ExitCode::Config,
            message: format!("cannot read config {}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError {
            code: ExitCode::Config,
            message: format!("invalid config {}: {e}", path.display()),
        })
    }

    /// Overlays `flags` on top of `self`; set flags win.
    pub fn merged_with(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        take!(
            input, masks, provider_cmd, output, preset, alpha_r, alpha_b, ismax, isfullblur,
            z_ref, lambda, include_items, on_detector_failure, workers, repeats, report_dir
        );
        self
    }
}

/// Parses a "WxH" resolution string.
pub fn parse_z_ref(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("expected a positive dimension, got {v:?}"))
    };
    Ok((parse(w)?, parse(h)?))
}
