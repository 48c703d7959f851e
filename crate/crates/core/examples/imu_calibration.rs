//! Flat-hand calibration of a glove whose IMUs are mounted a few degrees off and drift.
//!
//! The first frames of the stream hold the hand flat; their mean orientation per IMU
//! gives the corrections. A jittery window is refused instead of averaged.
//!
//! ```sh
//! cargo run --example imu_calibration
//! ```

use manugrip::kinematics::HandAngles;
use manugrip::pipeline::{calibrate_frames, calibrated, replay_frames, synth_frames, PipelineConfig};
use manugrip::sensor::{ImuNoiseModel, Scenario};

fn mean_abs_deg(angles: &[(f64, HandAngles)]) -> f64 {
    let vals: Vec<f64> = angles
        .iter()
        .flat_map(|(_, h)| h.fingers.iter().flat_map(|a| [a.theta1, a.theta2, a.theta3, a.beta]))
        .map(|v| v.to_degrees().abs())
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

fn main() -> manugrip::Result<()> {
    let mut config = PipelineConfig::default();
    config.noise = ImuNoiseModel { bias_deg: 0.0, std_deg: 0.0, drift_deg_per_s: Some(0.3), offset_deg: 4.0 };
    let frames = synth_frames(&config, Scenario::FlatHand)?;
    let reference = calibrate_frames(&config, &frames)?;

    let raw = replay_frames(&config, &frames)?;
    let fixed = replay_frames(&config, &calibrated(&frames, Some(&reference))?)?;
    let window = config.calibration.flat_frames;
    println!("mean |joint angle| over the flat window ({window} frames):");
    println!("  uncalibrated {:.3} deg", mean_abs_deg(&raw.angles[..window]));
    println!("  calibrated   {:.3} deg", mean_abs_deg(&fixed.angles[..window]));
    println!("  calibrated, whole stream (drift accumulates) {:.3} deg", mean_abs_deg(&fixed.angles));

    let jittery = PipelineConfig::default();
    match calibrate_frames(&jittery, &synth_frames(&jittery, Scenario::FlatHand)?) {
        Ok(_) => println!("default noise model: window accepted"),
        Err(e) => println!("default noise model: {e}"),
    }
    Ok(())
}
