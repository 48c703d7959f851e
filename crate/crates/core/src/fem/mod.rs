//! Fracture-capable hyperelastic simulation with barrier contact against scripted bodies.

pub mod barrier;
pub mod elastic;
pub mod fracture;
pub mod material;
pub mod metrics;
pub mod scenario;
pub mod scripted;
pub mod sim;
pub mod solver;
pub mod tetmesh;

pub use barrier::{active_pairs, barrier, barrier_d1, barrier_d2, min_distance, Collider, ContactPair};
pub use elastic::{elastic_energy, elastic_gradient, von_mises};
pub use fracture::{face_stretch_ratios, fracture_update, rebuild_topology, tet_components, Rebuilt};
pub use material::MaterialParams;
pub use metrics::{piece_surfaces, step_metrics, write_metrics_csv, StepMetrics};
pub use scenario::{Scene, SimScenario};
pub use scripted::{read_trajectories, read_trajectories_file, write_trajectories, ScriptedBody};
pub use sim::Simulation;
pub use solver::{simulate_step, IncrementalPotential, SimParams, SimState, StepReport};
pub use tetmesh::{InteriorFace, TetMesh};
