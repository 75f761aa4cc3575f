//! Scenario files and their command-line overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::configspace::Component;
use crate::numeric::Tolerances;
use crate::octa::{AntipodeMask, ExoticParams};
use crate::{Error, Result};

/// Which components a run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ComponentChoice {
    Plus,
    Minus,
    #[default]
    Both,
}

impl ComponentChoice {
    pub fn components(self) -> Vec<Component> {
        match self {
            Self::Plus => vec![Component::Plus],
            Self::Minus => vec![Component::Minus],
            Self::Both => Component::BOTH.to_vec(),
        }
    }
}

/// Everything a run needs. Every field has a default, so an empty file is a
/// valid scenario for the reference family.
///
/// ```toml
/// params = [0.1, 0.6, 0.2, 0.5]
/// samples = 512
/// seed = 42
/// component = "both"
/// masks = ["{}", "{a1,b3}"]
///
/// [tolerances]
/// fit = 1e-9
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub params: [f64; 4],
    /// Trace nodes per component.
    pub samples: usize,
    pub seed: u64,
    /// Monte-Carlo samples per sampled volume.
    pub mc_samples: u64,
    /// Sampled spot checks per mask and component in `bellows`.
    pub spot_checks: usize,
    pub component: ComponentChoice,
    /// Restricts `bellows` to these masks, written like `{a1,b3}`.
    pub masks: Option<Vec<String>>,
    pub tolerances: Tolerances,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            params: [0.1, 0.6, 0.2, 0.5],
            samples: 512,
            seed: 42,
            mc_samples: 1_000_000,
            spot_checks: 0,
            component: ComponentChoice::Both,
            masks: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn exotic_params(&self) -> ExoticParams {
        ExoticParams::from_array(self.params)
    }

    pub fn antipode_masks(&self) -> Result<Option<Vec<AntipodeMask>>> {
        self.masks.as_ref().map(|ms| ms.iter().map(|m| m.parse()).collect()).transpose()
    }

    /// Applies one `KEY=VAL` tolerance override.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<()> {
        let (key, value) =
            assignment.split_once('=').ok_or_else(|| Error::Parse(format!("expected KEY=VAL, got {assignment:?}")))?;
        let value: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("bad tolerance value in {assignment:?}")))?;
        self.tolerances.set(key.trim(), value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        assert_eq!(Scenario::from_toml("").unwrap(), Scenario::default());
    }

    #[test]
    fn round_trip_and_overrides() {
        let mut s = Scenario::from_toml("params = [-0.15, 0.55, 0.1, 0.45]\nmasks = [\"{a1,b3}\"]\n[tolerances]\nfit = 1e-9\n").unwrap();
        assert_eq!(s.tolerances.fit, 1e-9);
        assert_eq!(s.antipode_masks().unwrap().unwrap()[0].to_string(), "{a1,b3}");
        s.set_tolerance("geometric=2e-9").unwrap();
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
        assert!(s.set_tolerance("bogus=1").is_err());
        assert!(s.set_tolerance("fit").is_err());
        assert!(Scenario::from_toml("unknown = 3").is_err());
    }
}
