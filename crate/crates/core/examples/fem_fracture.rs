//! Cracking a walnut: a fast and a slow hammer strike and a knife cut on the same nut,
//! stepped with the barrier-contact FEM solver. Prints a per-step trace for each tool.
//!
//! ```sh
//! cargo run --release --example fem_fracture [hammer-fast|hammer-slow|knife|plate-press]
//! ```

use std::time::Instant;

use manugrip::fem::{SimParams, SimScenario, Simulation};

fn run(scenario: SimScenario) -> manugrip::Result<()> {
    let scene = scenario.build(&SimParams::default())?;
    let steps = scene.steps;
    println!("{}: {} tets, {} steps", scenario.name(), scene.mesh.tets.len(), steps);
    let started = Instant::now();
    let mut sim = Simulation::from_scene(scene)?;
    for _ in 0..steps {
        sim.step()?;
        let m = sim.metrics.last().expect("a metrics row per step");
        println!(
            "  t {:.2} s  energy {:>9.4} J  pieces {:>2}  pressure {:>10.3e} Pa  gap {:.2e} m",
            m.t,
            m.energy_j,
            m.pieces,
            m.pressure_pa,
            sim.min_distance()?
        );
    }
    println!("  done in {:.1?}\n", started.elapsed());
    Ok(())
}

fn main() -> manugrip::Result<()> {
    let chosen: Vec<SimScenario> = match std::env::args().nth(1) {
        Some(name) => vec![SimScenario::from_name(&name)?],
        None => vec![SimScenario::HammerFast, SimScenario::HammerSlow, SimScenario::Knife],
    };
    for s in chosen {
        run(s)?;
    }
    Ok(())
}
