//! Experiment configuration, read from TOML.
//!
//! Every key is optional; missing keys take the defaults below, which reproduce
//! the reference setup (N_u = 8, N_b = 12, λ/2 ULAs, λ/5 RIS spacing,
//! θ_b = θ_u = 40°, (φ_b, ψ_b) = (50°, 65°), (φ_u, ψ_u) = (50°, 30°)).
//!
//! ```toml
//! [scenario]          # degrees
//! theta_u = 40.0
//! theta_b = 40.0
//! phi_u = 50.0
//! psi_u = 30.0
//! phi_b = 50.0
//! psi_b = 65.0
//!
//! [arrays]
//! n_u = 8
//! n_b = 12
//! ula_spacing = 0.5   # wavelengths
//! ris_spacing = 0.2
//!
//! [sweep]
//! snr_db = [-10.0]
//! soundings = [5]         # L values, each >= 2
//! ris_sizes = [[16, 16]]  # [n_x, n_y] pairs
//! trials = 200
//! base_seed = 1
//! noise = true
//!
//! [grid]              # degrees
//! theta_min = -90.0
//! theta_max = 90.0
//! theta_step = 0.1
//! ris_min = 0.0
//! ris_max = 90.0
//! ris_coarse_step = 0.5
//! ris_fine_step = 0.02
//! ris_fine_half_width = 1.0
//!
//! [estimator]
//! ref_policy = "first"    # or "max-magnitude"
//!
//! [output]
//! csv = "results.csv"
//! spectrum = "spectrum.txt"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{Arrays, ChannelParams};
use crate::error::{Error, Result};
use crate::estimator::{AngleAxis, EstimatorConfig, RefPolicy, RisSearch};
use crate::geometry::{Angle, UlaConfig, UpaConfig};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub theta_u: f64,
    pub theta_b: f64,
    pub phi_u: f64,
    pub psi_u: f64,
    pub phi_b: f64,
    pub psi_b: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            theta_u: 40.0,
            theta_b: 40.0,
            phi_u: 50.0,
            psi_u: 30.0,
            phi_b: 50.0,
            psi_b: 65.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub n_u: usize,
    pub n_b: usize,
    pub ula_spacing: f64,
    pub ris_spacing: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            n_u: 8,
            n_b: 12,
            ula_spacing: UlaConfig::DEFAULT_SPACING,
            ris_spacing: UpaConfig::DEFAULT_SPACING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub soundings: Vec<usize>,
    pub ris_sizes: Vec<[usize; 2]>,
    pub trials: usize,
    pub base_seed: u64,
    pub noise: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![-10.0],
            soundings: vec![5],
            ris_sizes: vec![[16, 16]],
            trials: 200,
            base_seed: 1,
            noise: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_step: f64,
    pub ris_min: f64,
    pub ris_max: f64,
    pub ris_coarse_step: f64,
    pub ris_fine_step: f64,
    pub ris_fine_half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            theta_min: -90.0,
            theta_max: 90.0,
            theta_step: 0.1,
            ris_min: 0.0,
            ris_max: 90.0,
            ris_coarse_step: 0.5,
            ris_fine_step: 0.02,
            ris_fine_half_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefPolicySetting {
    #[default]
    First,
    MaxMagnitude,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSettings {
    pub ref_policy: RefPolicySetting,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub spectrum: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub arrays: ArrayConfig,
    pub sweep: SweepConfig,
    pub grid: GridConfig,
    pub estimator: EstimatorSettings,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if s.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if s.snr_db.is_empty() || s.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("snr_db must be a nonempty list of finite values".into()));
        }
        if s.soundings.is_empty() {
            return Err(Error::Config("soundings must be nonempty".into()));
        }
        if let Some(l) = s.soundings.iter().find(|l| **l < 2) {
            return Err(Error::InsufficientSoundings(*l));
        }
        if s.ris_sizes.is_empty() {
            return Err(Error::Config("ris_sizes must be nonempty".into()));
        }
        for [n_x, n_y] in &s.ris_sizes {
            self.arrays_for(*n_x, *n_y)?;
        }
        self.true_params(C64::new(1.0, 0.0)).validate()?;
        self.estimator_config()?;
        Ok(())
    }

    pub fn arrays_for(&self, n_x: usize, n_y: usize) -> Result<Arrays> {
        let a = &self.arrays;
        Arrays::new(
            UlaConfig::new(a.n_b, a.ula_spacing)?,
            UlaConfig::new(a.n_u, a.ula_spacing)?,
            UpaConfig::new(n_x, n_y, a.ris_spacing)?,
        )
    }

    pub fn true_params(&self, gain: C64) -> ChannelParams {
        let s = &self.scenario;
        ChannelParams {
            theta_u: Angle::from_degrees(s.theta_u),
            theta_b: Angle::from_degrees(s.theta_b),
            phi_u: Angle::from_degrees(s.phi_u),
            psi_u: Angle::from_degrees(s.psi_u),
            phi_b: Angle::from_degrees(s.phi_b),
            psi_b: Angle::from_degrees(s.psi_b),
            gain,
        }
    }

    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        let g = &self.grid;
        let ris_axis = AngleAxis::from_degrees(g.ris_min, g.ris_max, g.ris_coarse_step)?;
        if !(g.ris_fine_step >= 0.0 && g.ris_fine_half_width >= 0.0) {
            return Err(Error::Config("fine RIS search settings must be non-negative".into()));
        }
        Ok(EstimatorConfig {
            theta_axis: AngleAxis::from_degrees(g.theta_min, g.theta_max, g.theta_step)?,
            ris_search: RisSearch {
                phi_axis: ris_axis,
                psi_axis: ris_axis,
                fine_step_deg: g.ris_fine_step,
                fine_half_width_deg: g.ris_fine_half_width,
            },
            ref_policy: match self.estimator.ref_policy {
                RefPolicySetting::First => RefPolicy::First,
                RefPolicySetting::MaxMagnitude => RefPolicy::MaxMagnitude,
            },
            keep_diagnostics: false,
        })
    }

    /// The experiment parameters as TOML, without output paths.
    pub fn to_toml_string(&self) -> String {
        let mut cfg = self.clone();
        cfg.output = OutputConfig::default();
        toml::to_string(&cfg).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.arrays.n_u, 8);
        assert_eq!(cfg.arrays.n_b, 12);
        assert_eq!(cfg.sweep.trials, 200);
        assert_eq!(cfg.scenario.psi_b, 65.0);
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let text = "[sweep]\nsnr_db = [-20.0, 0.0]\nsoundings = [2, 5]\nris_sizes = [[8, 8], [16, 16]]\n\
                    [estimator]\nref_policy = \"max-magnitude\"\n";
        let cfg = ExperimentConfig::from_toml_str(text, Path::new("x.toml")).unwrap();
        assert_eq!(cfg.sweep.snr_db, vec![-20.0, 0.0]);
        assert_eq!(cfg.sweep.ris_sizes[0], [8, 8]);
        assert_eq!(cfg.estimator.ref_policy, RefPolicySetting::MaxMagnitude);
        assert_eq!(cfg.arrays.n_u, 8);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string(), Path::new("x")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            "[sweep]\ntrials = 0\n",
            "[sweep]\nsoundings = [1]\n",
            "[sweep]\nsnr_db = []\n",
            "[scenario]\nphi_u = 120.0\n",
            "[grid]\ntheta_step = 0.0\n",
            "[sweep]\nunknown_key = 3\n",
        ];
        for text in bad {
            assert!(ExperimentConfig::from_toml_str(text, Path::new("x")).is_err(), "{text}");
        }
    }
}
