//! Taxel voltages to forces under both calibration laws, then the three analysis
//! channels of a synthetic press-lid stream.
//!
//! ```sh
//! cargo run --example force_sensing
//! ```

use manugrip::pipeline::{replay_frames, synth_frames, PipelineConfig};
use manugrip::sensor::{force_to_voltage, voltage_to_force, ForceCalibration, Scenario};

fn main() -> manugrip::Result<()> {
    let (log, power) = (ForceCalibration::logarithmic(), ForceCalibration::power());
    println!("{:>6} {:>10} {:>10}", "V", "log N", "power N");
    for v in [0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
        println!("{v:>6.2} {:>10.4} {:>10.4}", voltage_to_force(v, &log).newtons, voltage_to_force(v, &power).newtons);
    }
    let v = force_to_voltage(2.0, &log)?;
    println!("2 N on the log law reads {v:.5} V");

    // Channel summary of a lid pressed down with the flat palm.
    let config = PipelineConfig::default();
    let replay = replay_frames(&config, &synth_frames(&config, Scenario::PressLid)?)?;
    let ch = &replay.channels;
    let max = |s: &[f64]| s.iter().cloned().fold(f64::MIN, f64::max);
    println!(
        "press-lid over {} frames: palm max {:.2} N, thumb tip max {:.2} N, index MCP max {:.1} deg",
        ch.len(),
        max(&ch.palm_force_n),
        max(&ch.thumb_tip_force_n),
        max(&ch.index_mcp_flexion_deg)
    );
    Ok(())
}
