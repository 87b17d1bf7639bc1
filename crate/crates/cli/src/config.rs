//! Optional TOML file overriding any pipeline knob.
//!
//! ```toml
//! [detector]
//! tau_edge = 0.1
//! min_area = 250
//! [detector.edge]
//! fudge_factor = 0.6
//!
//! [semantics]
//! min_confidence = 0.5
//! glyph_size = [24, 32]
//! ```

use std::fs;
use std::path::Path;

use cardvision::detector::DetectorConfig;
use cardvision::semantics::SemanticsConfig;
use serde::Deserialize;

use crate::error::{io_err, CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub detector: DetectorConfig,
    pub semantics: SemanticsConfig,
}

impl Config {
    /// Defaults, overlaid by `path` when given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.detector.validate()?;
        self.semantics.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(toml::from_str::<Config>("").unwrap(), Config::default());
    }

    #[test]
    fn nested_knobs_override() {
        let cfg: Config = toml::from_str(
            "[detector]\ntau_edge = 0.2\nmin_area = 50\ncard_aspect = [0.6, 0.8]\n\
             [detector.edge]\nfudge_factor = 0.7\n\
             [semantics]\nglyph_size = [20, 28]\nequalize_clip = 2.0\n\
             [semantics.conv_kernel]\nwidth = 1\nheight = 1\nweights = [1.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.detector.tau_edge, 0.2);
        assert_eq!(cfg.detector.min_area, Some(50));
        assert_eq!(cfg.detector.card_aspect, (0.6, 0.8));
        assert_eq!(cfg.detector.edge.fudge_factor, 0.7);
        assert_eq!(cfg.detector.crop_inset, DetectorConfig::default().crop_inset);
        assert_eq!(cfg.semantics.glyph_size, (20, 28));
        assert_eq!(cfg.semantics.equalize_clip, Some(2.0));
        assert_eq!(cfg.semantics.conv_kernel.width(), 1);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(toml::from_str::<Config>("[detector]\ntypo = 1\n").is_err());
        assert!(toml::from_str::<Config>("[other]\n").is_err());
        let even = "[semantics.conv_kernel]\nwidth = 2\nheight = 1\nweights = [0.5, 0.5]\n";
        assert!(toml::from_str::<Config>(even).is_err());
        let cfg: Config = toml::from_str("[detector]\ncard_aspect = [0.9, 0.5]\n").unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
    }
}
