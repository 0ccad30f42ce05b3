//! Run configuration shared by the subcommands, and its JSON form.

use std::path::Path;

use bergman_core::spectrum::DEGREE_CAP;
use bergman_core::{QuadConfig, SymbolSpec, WeightParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::oracle::McRun;

/// Smallest sample count accepted by `verify`.
pub const MIN_VERIFY_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lambda: f64,
    pub max_degree: u32,
    pub symbol_expr: String,
    pub quad: QuadConfig,
    pub mc_samples: u64,
    pub seed: u64,
    pub output_format: OutputFormat,
    /// `None` writes to standard output.
    pub output_path: Option<String>,
    #[serde(default)]
    pub allow_unbounded_weight: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lambda = 5.0;
        let max_degree = 6;
        Self {
            lambda,
            max_degree,
            symbol_expr: "1".into(),
            quad: QuadConfig::default_for(max_degree, WeightParams::new(lambda).expect("valid")),
            mc_samples: 1_000_000,
            seed: 0,
            output_format: OutputFormat::Csv,
            output_path: None,
            allow_unbounded_weight: false,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<WeightParams, CliError> {
        Ok(WeightParams::new(self.lambda)?)
    }

    pub fn symbol(&self) -> Result<SymbolSpec, CliError> {
        Ok(SymbolSpec::from_expr(&self.symbol_expr)?)
    }

    pub fn mc_run(&self) -> McRun {
        McRun {
            n: self.mc_samples,
            seed: self.seed,
            allow_unbounded: self.allow_unbounded_weight,
        }
    }

    /// Checks everything `spectrum` needs.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.max_degree > DEGREE_CAP {
            return Err(CliError::Config(format!(
                "max_degree must be at most {DEGREE_CAP}, got {}",
                self.max_degree
            )));
        }
        self.quad.validate()?;
        self.symbol()?;
        Ok(())
    }

    /// [`validate`](Self::validate) plus the sample-count floor of `verify`.
    pub fn validate_verify(&self) -> Result<(), CliError> {
        self.validate()?;
        if self.mc_samples < MIN_VERIFY_SAMPLES {
            return Err(CliError::Config(format!(
                "mc_samples must be at least {MIN_VERIFY_SAMPLES} for verify, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig {
            symbol_expr: "shell(0.1, 0.5) + i*r2".into(),
            output_path: Some("out.json".into()),
            seed: u64::MAX,
            ..RunConfig::default()
        };
        let back: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate_verify().is_err()
        };
        assert!(bad(|c| c.lambda = 3.0));
        assert!(bad(|c| c.max_degree = 13));
        assert!(bad(|c| c.symbol_expr = "r4".into()));
        assert!(bad(|c| c.quad.nodes_per_axis = 2));
        assert!(bad(|c| c.mc_samples = 9_999));
    }
}
