//! The single JSON document that parameterizes every command.
//!
//! Every field has a default, so `{}` is a valid config. Units are carried in the
//! field names.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{MaterialParams, SimParams};
use crate::grasp::collision::DEFAULT_CAPSULE_RADIUS;
use crate::kinematics::HandGeometry;
use crate::sensor::{ForceCalibration, ImuNoiseModel, TaxelLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Frame rate of synthesized streams.
    pub sample_rate_hz: f64,
    pub hand: HandGeometry,
    pub taxels: TaxelLayout,
    pub force: ForceCalibration,
    pub noise: ImuNoiseModel,
    pub grasp: GraspConfig,
    pub calibration: CalibrationConfig,
    pub sim: SimConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            sample_rate_hz: 20.0,
            hand: HandGeometry::default(),
            taxels: TaxelLayout::default(),
            force: ForceCalibration::default(),
            noise: ImuNoiseModel::default(),
            grasp: GraspConfig::default(),
            calibration: CalibrationConfig::default(),
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraspConfig {
    pub capsule_radius_m: f64,
    /// Extra consecutive frames a transition condition must hold before it fires.
    pub debounce_frames: u32,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig { capsule_radius_m: DEFAULT_CAPSULE_RADIUS, debounce_frames: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Length of the flat-hand window taken from the head of the stream.
    pub flat_frames: usize,
    /// Shortest usable window.
    pub min_flat_frames: usize,
    /// Largest angle allowed between any two samples of one IMU inside the window.
    pub max_spread_deg: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { flat_frames: 20, min_flat_frames: 10, max_spread_deg: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    #[serde(flatten)]
    pub params: SimParams,
    /// Steps between OBJ snapshots; 0 keeps only the initial one.
    pub snapshot_every_steps: usize,
    /// Replaces the scenario's own material when set.
    pub material: Option<MaterialParams>,
    /// Number of steps; scenarios and trajectory horizons decide when absent.
    pub steps: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            params: SimParams::default(),
            snapshot_every_steps: crate::fem::sim::SNAPSHOT_INTERVAL,
            material: None,
            steps: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical serialization; its hash identifies the effective configuration.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.hand.validate().map_err(wrap)?;
        self.taxels.validate().map_err(wrap)?;
        self.force.validate().map_err(wrap)?;
        self.noise.validate().map_err(wrap)?;
        self.sim.params.validate().map_err(wrap)?;
        if let Some(m) = &self.sim.material {
            m.validate().map_err(wrap)?;
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::Config(format!("sample_rate_hz must be positive, got {}", self.sample_rate_hz)));
        }
        if !(self.grasp.capsule_radius_m > 0.0 && self.grasp.capsule_radius_m.is_finite()) {
            return Err(Error::Config(format!("capsule_radius_m must be positive, got {}", self.grasp.capsule_radius_m)));
        }
        let c = &self.calibration;
        if c.min_flat_frames == 0 || c.flat_frames < c.min_flat_frames {
            return Err(Error::Config(format!(
                "need 0 < min_flat_frames <= flat_frames, got {} and {}",
                c.min_flat_frames, c.flat_frames
            )));
        }
        if !(c.max_spread_deg > 0.0) {
            return Err(Error::Config(format!("max_spread_deg must be positive, got {}", c.max_spread_deg)));
        }
        Ok(())
    }
}
