//! JSON run configuration.
//!
//! ```json
//! {
//!   "resistors_ohm": { "r_la": 1000, "r_ha": 10000, "r_lb": 5000, "r_hb": 9000 },
//!   "v_la_variance_v2": 1.0,
//!   "samples_per_bit": 1000,
//!   "num_bits": 1000000,
//!   "master_seed": 0,
//!   "state_policy": "alternate"
//! }
//! ```
//!
//! `variances_v2` (`v_la`, `v_ha`, `v_lb`, `v_hb`) may replace or accompany
//! `v_la_variance_v2`; when present it is used as-is instead of solving.
//! Unknown keys are ignored so that a run's `metadata.json` is itself a
//! valid config.

use std::fs;
use std::path::Path;

use kljn_core::{solve_variances, NoiseVariances, ResistorQuad, SimConfig, StatePolicy};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_HISTOGRAM_BINS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resistors {
    pub r_la: f64,
    pub r_ha: f64,
    pub r_lb: f64,
    pub r_hb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Variances {
    pub v_la: f64,
    pub v_ha: f64,
    pub v_lb: f64,
    pub v_hb: f64,
}

impl From<&NoiseVariances> for Variances {
    fn from(v: &NoiseVariances) -> Self {
        Self {
            v_la: v.v_la_sq(),
            v_ha: v.v_ha_sq(),
            v_lb: v.v_lb_sq(),
            v_hb: v.v_hb_sq(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    #[default]
    Alternate,
    Random,
}

impl From<Policy> for StatePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Alternate => StatePolicy::Alternate,
            Policy::Random => StatePolicy::Random,
        }
    }
}

fn default_samples() -> usize {
    SimConfig::DEFAULT_SAMPLES_PER_BIT
}

fn default_bits() -> usize {
    SimConfig::DEFAULT_NUM_BITS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub resistors_ohm: Resistors,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_la_variance_v2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variances_v2: Option<Variances>,
    #[serde(default = "default_samples")]
    pub samples_per_bit: usize,
    #[serde(default = "default_bits")]
    pub num_bits: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub state_policy: Policy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram_bins: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn quad(&self) -> Result<ResistorQuad, CliError> {
        let r = &self.resistors_ohm;
        Ok(ResistorQuad::new(r.r_la, r.r_ha, r.r_lb, r.r_hb)?)
    }

    pub fn reference_variance(&self) -> Result<f64, CliError> {
        self.v_la_variance_v2
            .ok_or_else(|| CliError::Usage("config has no v_la_variance_v2 to solve from".into()))
    }

    pub fn explicit_variances(&self) -> Result<Option<NoiseVariances>, CliError> {
        self.variances_v2
            .map(|v| NoiseVariances::new(v.v_la, v.v_ha, v.v_lb, v.v_hb).map_err(CliError::from))
            .transpose()
    }

    pub fn solved_variances(&self) -> Result<NoiseVariances, CliError> {
        Ok(solve_variances(&self.quad()?, self.reference_variance()?)?)
    }

    /// Explicit variances if given, otherwise the solver's.
    pub fn effective_variances(&self) -> Result<NoiseVariances, CliError> {
        match self.explicit_variances()? {
            Some(v) => Ok(v),
            None => self.solved_variances(),
        }
    }

    pub fn histogram_bins(&self) -> usize {
        self.histogram_bins.unwrap_or(DEFAULT_HISTOGRAM_BINS)
    }
}
