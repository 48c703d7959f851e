//! Time-stepping driver: solve, fracture, rebuild, measure.

use std::path::Path;

use crate::error::{Error, Result};

use super::barrier::min_distance;
use super::fracture::{fracture_update, rebuild_topology};
use super::material::MaterialParams;
use super::metrics::{piece_surfaces, step_metrics, StepMetrics};
use super::scenario::Scene;
use super::scripted::ScriptedBody;
use super::solver::{collider_for, simulate_step, SimParams, SimState, StepReport};
use super::tetmesh::TetMesh;

/// How many times a failing step may be halved.
const MAX_SUBDIVISIONS: u32 = 3;
pub const SNAPSHOT_INTERVAL: usize = 10;

#[derive(Debug, Clone)]
pub struct Simulation {
    pub mesh: TetMesh,
    pub material: MaterialParams,
    pub bodies: Vec<ScriptedBody>,
    pub params: SimParams,
    pub state: SimState,
    pub dhat: f64,
    pub eps: f64,
    pub metrics: Vec<StepMetrics>,
    /// Solver reports of every (sub)step taken.
    pub reports: Vec<StepReport>,
    pub steps_taken: usize,
    /// Steps between OBJ snapshots in [`Simulation::run`].
    pub snapshot_every: usize,
}

impl Simulation {
    pub fn new(mesh: TetMesh, material: MaterialParams, bodies: Vec<ScriptedBody>, params: SimParams) -> Result<Self> {
        material.validate()?;
        params.validate()?;
        let dhat = params.dhat(&mesh);
        let eps = params.eps_rel * mesh.diagonal();
        let state = SimState::at_rest(&mesh);
        let sim = Simulation {
            mesh,
            material,
            bodies,
            params,
            state,
            dhat,
            eps,
            metrics: Vec::new(),
            reports: Vec::new(),
            steps_taken: 0,
            snapshot_every: SNAPSHOT_INTERVAL,
        };
        let gap = sim.min_distance()?;
        if !(gap > 0.0) {
            return Err(Error::InvariantViolation(format!("initial scene intersects (minimum distance {gap})")));
        }
        Ok(sim)
    }

    pub fn from_scene(scene: Scene) -> Result<Self> {
        Simulation::new(scene.mesh, scene.material, scene.bodies, scene.params)
    }

    /// Exhaustive minimum distance over all object and tool surface pairs at the current time.
    pub fn min_distance(&self) -> Result<f64> {
        let collider = collider_for(&self.mesh, &self.bodies);
        let mut pos = self.state.x.clone();
        for b in &self.bodies {
            pos.extend(b.world_vertices(self.state.t)?);
        }
        Ok(min_distance(&pos, &collider))
    }

    fn advance(&mut self, dt: f64, depth: u32) -> Result<()> {
        match simulate_step(&self.state, &self.mesh, &self.material, &self.bodies, &self.params, dt) {
            Ok((next, report)) => {
                self.state = next;
                self.reports.push(report);
                Ok(())
            }
            Err(Error::StepFailure { .. }) if depth < MAX_SUBDIVISIONS => {
                self.advance(0.5 * dt, depth + 1)?;
                self.advance(0.5 * dt, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// One step of length `dt_s`, followed by fracture and metrics.
    pub fn step(&mut self) -> Result<StepMetrics> {
        self.advance(self.params.dt_s, 0)?;
        let fresh = fracture_update(&self.state.x, &self.mesh, self.material.fracture_stretch, &self.state.separated)?;
        if !fresh.is_empty() {
            self.state.separated.extend(fresh);
            let rebuilt = rebuild_topology(&self.mesh, &self.state, &self.bodies, self.eps)?;
            self.mesh = rebuilt.mesh;
            self.state = rebuilt.state;
        }
        self.steps_taken += 1;
        let m = step_metrics(&self.state, &self.mesh, &self.material, &self.bodies, self.dhat)?;
        self.metrics.push(m);
        Ok(m)
    }

    /// Writes one OBJ per piece named `step_NNNN_piece_KK.obj`.
    pub fn write_snapshot(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        piece_surfaces(&self.mesh, &self.state.x, &self.state.separated)
            .into_iter()
            .enumerate()
            .map(|(k, doc)| {
                let path = dir.join(format!("step_{:04}_piece_{k:02}.obj", self.steps_taken));
                std::fs::write(&path, doc)?;
                Ok(path)
            })
            .collect()
    }

    /// Runs `steps` steps, snapshotting at the start and every `snapshot_every` steps when
/// `dir` is given.
    pub fn run(&mut self, steps: usize, dir: Option<&Path>) -> Result<Vec<std::path::PathBuf>> {
        let mut files = Vec::new();
        if let Some(d) = dir {
            files.extend(self.write_snapshot(d)?);
        }
        for _ in 0..steps {
            self.step()?;
            if let Some(d) = dir {
                if self.snapshot_every > 0 && self.steps_taken.is_multiple_of(self.snapshot_every) {
                    files.extend(self.write_snapshot(d)?);
                }
            }
        }
        Ok(files)
    }
}
