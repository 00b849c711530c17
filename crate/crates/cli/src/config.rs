use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lsxgc_core::data::{MatrixFormat, Orientation};
use lsxgc_core::simulator::SimulationConfig;
use lsxgc_core::{AnalysisConfig, Error, Method, Result};

/// Everything a run needs, loadable from `--config file.json`. Command-line
/// flags are applied on top and win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub simulation: SimulationConfig,
    pub analysis: AnalysisConfig,
    /// Empty means "command default" (lsxgc for analyze, all for bench).
    pub methods: Vec<Method>,
    pub out: Option<PathBuf>,
    /// Dataset directory for `bench`; input CSV for `analyze`.
    pub data: Option<PathBuf>,
    pub format: Option<MatrixFormat>,
    pub orientation: Option<Orientation>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn methods_or(&self, default: &[Method]) -> Vec<Method> {
        if self.methods.is_empty() {
            default.to_vec()
        } else {
            self.methods.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_sections_parse() {
        let cfg: CliConfig = serde_json::from_str(
            r#"{"simulation": {"n_nodes": 8, "seed": 3}, "analysis": {"m": 3}, "methods": ["lsxgc", "gc"], "format": "json"}"#,
        )
        .unwrap();
        assert_eq!(cfg.simulation.n_nodes, 8);
        assert_eq!(cfg.simulation.n_realizations, 50);
        assert_eq!(cfg.analysis.m, 3);
        assert_eq!(cfg.methods, vec![Method::Lsxgc, Method::Gc]);
        assert_eq!(cfg.format, Some(MatrixFormat::Json));
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        for bad in [r#"{"simulaton": {}}"#, r#"{"analysis": {"lags": 2}}"#, r#"{"simulation": {"nodes": 2}}"#] {
            assert!(serde_json::from_str::<CliConfig>(bad).is_err(), "{bad}");
        }
    }
}
