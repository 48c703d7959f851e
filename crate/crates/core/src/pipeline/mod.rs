//! Reproducible command pipelines over the sensing, grasp and simulation modules.
//!
//! A run takes a [`PipelineConfig`], reads its inputs, writes outputs into one directory
//! and records a [`RunManifest`] with the config hash and the digest of every file it
//! touched. Runs are deterministic: identical config, seed and inputs give identical bytes.

pub mod commands;
pub mod config;
pub mod manifest;

pub use commands::{
    angles_csv, calibrate_frames, calibrated, cmd_calibrate, cmd_grasp, cmd_replay, cmd_simulate, cmd_synth,
    grasp_frames, replay_frames, scenario_object, synth_frames, trajectory_csv, GraspInputs, GraspRun, Replay,
    SimInput,
};
pub use config::{CalibrationConfig, GraspConfig, PipelineConfig, SimConfig};
pub use manifest::{sha256_hex, FileDigest, Run, RunManifest, MANIFEST_NAME};
