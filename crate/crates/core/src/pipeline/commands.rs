//! The five pipeline commands and the in-memory steps behind them.
//!
//! Each `cmd_*` function reads its inputs through a [`Run`], writes its files under the
//! output directory and finishes with a `manifest.json`. The helpers without the prefix
//! do the same work on values and are what tests and examples call directly.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fem::{piece_surfaces, write_metrics_csv, MaterialParams, ScriptedBody, SimScenario, Simulation, TetMesh};
use crate::grasp::{aggregate_contacts, read_contact_log, write_contact_log, ContactLog, GraspSession, ObjectMesh};
use crate::kinematics::{
    apply_calibration, build_calibration_from, hand_angles_from_imus, reconstruct_hand, CalibrationReference, Finger,
    HandAngles, HandState,
};
use crate::math::{quat_mean, Vec3};
use crate::sensor::scenario::pick_place_bar;
use crate::sensor::{
    extract_channels, read_stream, scenario_samples, synth_imu_stream, write_stream, AnalysisChannels, GloveFrame,
    Scenario, IMU_COUNT,
};

use super::config::PipelineConfig;
use super::manifest::{Run, RunManifest};

pub const STREAM_FILE: &str = "stream.jsonl";
pub const OBJECT_FILE: &str = "object.obj";
pub const CALIBRATION_FILE: &str = "calibration.json";
pub const ANGLES_FILE: &str = "angles.csv";
pub const CHANNELS_FILE: &str = "channels.csv";
pub const CONTACT_LOG_FILE: &str = "contact_log.jsonl";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "contact_summary.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Synthetic glove stream of a named scenario.
pub fn synth_frames(config: &PipelineConfig, scenario: Scenario) -> Result<Vec<GloveFrame>> {
    let samples = scenario_samples(scenario, config.sample_rate_hz, &config.taxels, &config.force, config.seed)?;
    synth_imu_stream(&config.hand, &samples, &config.noise, config.seed)
}

/// World-frame object a scenario interacts with, if it has one.
pub fn scenario_object(scenario: Scenario) -> Option<ObjectMesh> {
    (scenario == Scenario::PickPlace).then(|| {
        let (centre, half) = pick_place_bar();
        let mut bar = ObjectMesh::cuboid(half);
        bar.vertices.iter_mut().for_each(|v| *v += centre);
        bar
    })
}

/// Flat-hand calibration from the head of a stream.
///
/// The window is refused when any IMU turns by `max_spread_deg` or more between two of
/// its samples.
pub fn calibrate_frames(config: &PipelineConfig, frames: &[GloveFrame]) -> Result<CalibrationReference> {
    let c = &config.calibration;
    let n = frames.len().min(c.flat_frames);
    if n < c.min_flat_frames {
        return Err(Error::InsufficientSamples(format!(
            "{n} flat-hand frames, calibration needs at least {}",
            c.min_flat_frames
        )));
    }
    let window = &frames[..n];
    let mut means = Vec::with_capacity(IMU_COUNT);
    for k in 0..IMU_COUNT {
        let samples: Vec<_> = window.iter().map(|f| f.imu[k]).collect();
        let mut spread = 0.0f64;
        for (i, a) in samples.iter().enumerate() {
            for b in &samples[i + 1..] {
                spread = spread.max(a.angle_to(b).to_degrees());
            }
        }
        if spread >= c.max_spread_deg {
            return Err(Error::CalibrationRefused(format!(
                "IMU {k} turns {spread:.2} deg within the flat window, limit {} deg",
                c.max_spread_deg
            )));
        }
        means.push(quat_mean(&samples).expect("clustered samples have a mean"));
    }
    build_calibration_from(&config.hand, &means)
}

pub fn calibrated(frames: &[GloveFrame], reference: Option<&CalibrationReference>) -> Result<Vec<GloveFrame>> {
    match reference {
        Some(r) => frames.iter().map(|f| apply_calibration(r, f)).collect(),
        None => Ok(frames.to_vec()),
    }
}

/// Clamped joint angles and analysis channels of calibrated frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub angles: Vec<(f64, HandAngles)>,
    pub channels: AnalysisChannels,
}

pub fn replay_frames(config: &PipelineConfig, frames: &[GloveFrame]) -> Result<Replay> {
    let angles = frames
        .iter()
        .map(|f| Ok((f.t, hand_angles_from_imus(&config.hand, &f.imu)?.clamped())))
        .collect::<Result<Vec<_>>>()?;
    let channels = extract_channels(frames, &config.taxels, &config.force, &config.hand)?;
    Ok(Replay { angles, channels })
}

/// Joint angles in degrees, one row per frame. The thumb has no third flexion column.
pub fn angles_csv(angles: &[(f64, HandAngles)]) -> String {
    let mut s = String::from("t");
    for f in Finger::ALL {
        let n = f.name();
        s.push_str(&format!(",{n}_theta1_deg,{n}_theta2_deg"));
        if f != Finger::Thumb {
            s.push_str(&format!(",{n}_theta3_deg"));
        }
        s.push_str(&format!(",{n}_beta_deg"));
    }
    s.push('\n');
    for (t, a) in angles {
        s.push_str(&t.to_string());
        for f in Finger::ALL {
            let x = a.finger(f);
            let mut cols = vec![x.theta1, x.theta2];
            if f != Finger::Thumb {
                cols.push(x.theta3);
            }
            cols.push(x.beta);
            for c in cols {
                s.push_str(&format!(",{}", c.to_degrees()));
            }
        }
        s.push('\n');
    }
    s
}

/// Contact log and posed hands of one grasp replay.
#[derive(Debug, Clone)]
pub struct GraspRun {
    pub log: ContactLog,
    pub hands: Vec<HandState>,
}

pub fn grasp_frames(config: &PipelineConfig, frames: &[GloveFrame], mesh: ObjectMesh) -> Result<GraspRun> {
    let mut session =
        GraspSession::new(config.hand.clone(), mesh, config.grasp.capsule_radius_m, config.grasp.debounce_frames)?;
    let mut log = Vec::with_capacity(frames.len());
    let mut hands = Vec::with_capacity(frames.len());
    for f in frames {
        let hand = reconstruct_hand(&config.hand, f)?;
        log.push(session.step(f.t, &hand)?);
        hands.push(hand);
    }
    Ok(GraspRun { log, hands })
}

/// Wrist, fingertip and object paths in metres, plus the grasp phase.
pub fn trajectory_csv(run: &GraspRun) -> String {
    let xyz = |name: &str| format!(",{name}_x_m,{name}_y_m,{name}_z_m");
    let mut s = String::from("t,phase");
    s.push_str(&xyz("wrist"));
    for f in Finger::ALL {
        s.push_str(&xyz(&format!("{}_tip", f.name())));
    }
    s.push_str(&xyz("object"));
    s.push('\n');
    let cols = |v: Vec3| format!(",{},{},{}", v.x, v.y, v.z);
    for (entry, hand) in run.log.iter().zip(&run.hands) {
        let phase = serde_json::to_value(entry.phase).expect("phase serializes");
        s.push_str(&format!("{},{}", entry.t, phase.as_str().unwrap_or_default()));
        s.push_str(&cols(hand.wrist.translation.vector));
        for f in Finger::ALL {
            s.push_str(&cols(hand.world_fingertip(f)));
        }
        s.push_str(&cols(entry.object_pose.translation.vector));
        s.push('\n');
    }
    s
}

fn load_stream(run: &mut Run, path: &Path) -> Result<Vec<GloveFrame>> {
    let bytes = run.input(path)?;
    let frames = read_stream(bytes.as_slice())?;
    if frames.is_empty() {
        return Err(Error::InsufficientSamples(format!("{} holds no frames", path.display())));
    }
    Ok(frames)
}

fn load_calibration(run: &mut Run, path: Option<&Path>) -> Result<Option<CalibrationReference>> {
    path.map(|p| CalibrationReference::from_json(&run.input_text(p)?)).transpose()
}

fn load_mesh(run: &mut Run, path: &Path) -> Result<ObjectMesh> {
    ObjectMesh::read_obj(run.input(path)?.as_slice())
}

fn obj_text(mesh: &ObjectMesh) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    mesh.write_obj(&mut buf)?;
    Ok(buf)
}

/// `synth <scenario>`: glove stream, plus the object mesh for scenarios that have one.
pub fn cmd_synth(config: &PipelineConfig, scenario: &str, out: &Path) -> Result<RunManifest> {
    let scenario = Scenario::from_name(scenario)?;
    let mut run = Run::new(config.clone(), out)?;
    let frames = synth_frames(config, scenario)?;
    let mut buf = Vec::new();
    write_stream(&mut buf, &frames)?;
    run.write(STREAM_FILE, &buf)?;
    if let Some(mesh) = scenario_object(scenario) {
        run.write(OBJECT_FILE, &obj_text(&mesh)?)?;
    }
    run.finish("synth")
}

/// `calibrate <stream>`: corrections from the stream's flat-hand head.
pub fn cmd_calibrate(config: &PipelineConfig, stream: &Path, out: &Path) -> Result<RunManifest> {
    let mut run = Run::new(config.clone(), out)?;
    let frames = load_stream(&mut run, stream)?;
    let reference = calibrate_frames(config, &frames)?;
    run.write(CALIBRATION_FILE, (reference.to_json()? + "\n").as_bytes())?;
    run.finish("calibrate")
}

/// `replay <stream>`: joint-angle and analysis-channel CSVs.
pub fn cmd_replay(config: &PipelineConfig, stream: &Path, calibration: Option<&Path>, out: &Path) -> Result<RunManifest> {
    let mut run = Run::new(config.clone(), out)?;
    let frames = load_stream(&mut run, stream)?;
    let reference = load_calibration(&mut run, calibration)?;
    let replay = replay_frames(config, &calibrated(&frames, reference.as_ref())?)?;
    run.write(ANGLES_FILE, angles_csv(&replay.angles).as_bytes())?;
    run.write(CHANNELS_FILE, replay.channels.to_csv().as_bytes())?;
    run.finish("replay")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GraspInputs<'a> {
    pub stream: Option<&'a Path>,
    pub mesh: Option<&'a Path>,
    pub calibration: Option<&'a Path>,
    /// Earlier contact logs to summarize together with this run's log.
    pub aggregate: &'a [PathBuf],
}

/// `grasp <stream> --mesh <obj>`: contact log and trajectories; with `--aggregate`, a
/// per-phalanx contact summary as well.
pub fn cmd_grasp(config: &PipelineConfig, inputs: GraspInputs<'_>, out: &Path) -> Result<RunManifest> {
    if inputs.stream.is_none() && inputs.aggregate.is_empty() {
        return Err(Error::InvalidArgument("grasp needs a stream, contact logs to aggregate, or both".into()));
    }
    let mut run = Run::new(config.clone(), out)?;
    let mut logs = Vec::new();
    if let Some(stream) = inputs.stream {
        let mesh_path = inputs.mesh.ok_or_else(|| Error::InvalidArgument("grasp needs --mesh with a stream".into()))?;
        let mesh = load_mesh(&mut run, mesh_path)?;
        mesh.require_watertight()?;
        let frames = load_stream(&mut run, stream)?;
        let reference = load_calibration(&mut run, inputs.calibration)?;
        let result = grasp_frames(config, &calibrated(&frames, reference.as_ref())?, mesh)?;
        let mut buf = Vec::new();
        write_contact_log(&mut buf, &result.log)?;
        run.write(CONTACT_LOG_FILE, &buf)?;
        run.write(TRAJECTORY_FILE, trajectory_csv(&result).as_bytes())?;
        logs.push(result.log);
    }
    if !inputs.aggregate.is_empty() {
        for path in inputs.aggregate {
            logs.push(read_contact_log(run.input(path)?.as_slice())?);
        }
        let summary = aggregate_contacts(&logs)?;
        run.write(SUMMARY_FILE, (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())?;
    }
    run.finish("grasp")
}

/// Where `simulate` gets its scene.
#[derive(Debug, Clone)]
pub enum SimInput {
    /// One of the built-in scenes by name.
    Scenario(String),
    /// Pose tracks, one tool surface per body id in order, and the target tet mesh.
    Files { trajectories: PathBuf, tools: Vec<PathBuf>, nodes: PathBuf, elements: PathBuf },
}

struct SimSetup {
    mesh: TetMesh,
    material: MaterialParams,
    bodies: Vec<ScriptedBody>,
    steps: usize,
}

fn scene_from_files(
    run: &mut Run,
    trajectories: &Path,
    tools: &[PathBuf],
    nodes: &Path,
    elements: &Path,
) -> Result<SimSetup> {
    let config = run.config.clone();
    let tracks = crate::fem::read_trajectories(run.input(trajectories)?.as_slice())?;
    let mesh = TetMesh::read(run.input(nodes)?.as_slice(), run.input(elements)?.as_slice())?;
    if let Some(id) = tracks.keys().find(|&&id| id >= tools.len()) {
        return Err(Error::InvalidArgument(format!("trajectory body {id} has no tool mesh")));
    }
    let mut bodies = Vec::with_capacity(tools.len());
    for (id, path) in tools.iter().enumerate() {
        let track = tracks
            .get(&id)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("tool {id} ({}) has no trajectory", path.display())))?;
        bodies.push(ScriptedBody::new(id, load_mesh(run, path)?, track)?);
    }
    let dt = config.sim.params.dt_s;
    let horizon = bodies.iter().filter_map(|b| b.horizon()).map(|(_, end)| end).reduce(f64::min);
    let steps = match (config.sim.steps, horizon) {
        (Some(n), Some(end)) if n as f64 * dt > end + 1e-9 => {
            return Err(Error::InvalidArgument(format!(
                "{n} steps of {dt} s run past the trajectory horizon {end} s"
            )))
        }
        (Some(n), _) => n,
        (None, Some(end)) => (end / dt + 1e-9).floor() as usize,
        (None, None) => {
            return Err(Error::InvalidArgument("all bodies are static; set sim.steps".into()));
        }
    };
    Ok(SimSetup { mesh, material: config.sim.material.unwrap_or_else(MaterialParams::carrot), bodies, steps })
}

/// `simulate`: per-step metrics CSV and OBJ snapshots of every piece.
///
/// A failing step still leaves the metrics of the accepted steps on disk before the
/// error is returned.
pub fn cmd_simulate(config: &PipelineConfig, input: &SimInput, out: &Path) -> Result<RunManifest> {
    let mut run = Run::new(config.clone(), out)?;
    let setup = match input {
        SimInput::Scenario(name) => {
            let scene = SimScenario::from_name(name)?.build(&config.sim.params)?;
            SimSetup {
                steps: config.sim.steps.unwrap_or(scene.steps),
                material: config.sim.material.unwrap_or(scene.material),
                mesh: scene.mesh,
                bodies: scene.bodies,
            }
        }
        SimInput::Files { trajectories, tools, nodes, elements } => {
            scene_from_files(&mut run, trajectories, tools, nodes, elements)?
        }
    };
    let mut sim = Simulation::new(setup.mesh, setup.material, setup.bodies, config.sim.params.clone())?;
    let every = config.sim.snapshot_every_steps;
    snapshot(&mut run, &sim)?;
    let mut failure = None;
    for _ in 0..setup.steps {
        if let Err(e) = sim.step() {
            failure = Some(e);
            break;
        }
        if every > 0 && sim.steps_taken % every == 0 {
            snapshot(&mut run, &sim)?;
        }
    }
    let mut csv = Vec::new();
    write_metrics_csv(&mut csv, &sim.metrics)?;
    run.write(METRICS_FILE, &csv)?;
    if let Some(e) = failure {
        return Err(e);
    }
    run.finish("simulate")
}

fn snapshot(run: &mut Run, sim: &Simulation) -> Result<()> {
    for (k, doc) in piece_surfaces(&sim.mesh, &sim.state.x, &sim.state.separated).into_iter().enumerate() {
        run.write(&format!("{SNAPSHOT_DIR}/step_{:04}_piece_{k:02}.obj", sim.steps_taken), doc.as_bytes())?;
    }
    Ok(())
}
