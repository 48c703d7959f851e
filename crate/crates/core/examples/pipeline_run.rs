//! The full file-based pipeline in one process: synthesize a stream, replay it, run the
//! grasp analysis and a short simulation, then print each run's manifest.
//!
//! ```sh
//! cargo run --example pipeline_run -- /tmp/manugrip-demo
//! ```

use std::path::PathBuf;

use manugrip::pipeline::{cmd_grasp, cmd_replay, cmd_simulate, cmd_synth, GraspInputs, PipelineConfig, SimInput};

fn main() -> manugrip::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline-demo".into()));
    let mut config = PipelineConfig::default();
    config.seed = 7;
    config.sim.steps = Some(20);

    let synth = cmd_synth(&config, "pick-place", &root.join("synth"))?;
    let stream = root.join("synth/stream.jsonl");
    let mesh = root.join("synth/object.obj");
    let replay = cmd_replay(&config, &stream, None, &root.join("replay"))?;
    let inputs = GraspInputs { stream: Some(&stream), mesh: Some(&mesh), ..Default::default() };
    let grasp = cmd_grasp(&config, inputs, &root.join("grasp"))?;
    let sim = cmd_simulate(&config, &SimInput::Scenario("plate-press".into()), &root.join("simulate"))?;

    for m in [synth, replay, grasp, sim] {
        println!("{} (config {})", m.command, &m.config_sha256[..12]);
        for f in &m.inputs {
            println!("  in  {} {}", &f.sha256[..12], f.path);
        }
        for f in m.outputs.iter().take(6) {
            println!("  out {} {}", &f.sha256[..12], f.path);
        }
        if m.outputs.len() > 6 {
            println!("  ... {} more outputs", m.outputs.len() - 6);
        }
    }
    println!("outputs under {}", root.display());
    Ok(())
}
