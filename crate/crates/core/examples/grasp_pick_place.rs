//! Pick-and-place of a small bar: the grasp state machine tracks Free, Touching and Caged
//! phases, carries the bar while caged and drops it where the hand lets go.
//!
//! ```sh
//! cargo run --example grasp_pick_place
//! ```

use manugrip::grasp::GraspPhase;
use manugrip::kinematics::hand::phalanx_name;
use manugrip::pipeline::{grasp_frames, scenario_object, synth_frames, PipelineConfig};
use manugrip::sensor::Scenario;

fn main() -> manugrip::Result<()> {
    let config = PipelineConfig::default();
    let frames = synth_frames(&config, Scenario::PickPlace)?;
    let bar = scenario_object(Scenario::PickPlace).expect("pick-place has an object");
    let start = bar.pose.translation.vector;
    let run = grasp_frames(&config, &frames, bar)?;

    let mut last: Option<GraspPhase> = None;
    for entry in &run.log {
        if last != Some(entry.phase) {
            let names: Vec<String> = entry.contacts.iter().map(|c| phalanx_name(c.phalanx)).collect();
            println!("t = {:.2} s  {:<8} contacts: {}", entry.t, format!("{:?}", entry.phase), names.join(", "));
            last = Some(entry.phase);
        }
    }
    let end = run.log.last().expect("non-empty stream").object_pose.translation.vector;
    let caged = run.log.iter().filter(|e| e.phase == GraspPhase::Caged).count();
    println!("caged for {caged} frames; bar moved {:.3} m to ({:.3}, {:.3}, {:.3})", (end - start).norm(), end.x, end.y, end.z);
    Ok(())
}
