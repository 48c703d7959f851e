//! Virtual-hand collisions, caging-based grasp detection, haptic channels and contact logs.

pub mod aggregate;
pub mod collision;
pub mod log;
pub mod mesh;
pub mod query;
pub mod state;

pub use aggregate::{aggregate_contacts, gaussian_fit, ContactCluster, ContactSummary};
pub use collision::{
    detect_collisions, Capsule, CollisionPoint, HandCollisionModel, PalmBox, DEFAULT_CAPSULE_RADIUS,
    HAPTIC_CHANNELS, PALM_ID,
};
pub use log::{read_contact_log, read_contact_log_file, write_contact_log, ContactLog, ContactLogEntry};
pub use mesh::ObjectMesh;
pub use query::{closest_point_on_mesh, point_in_mesh, point_in_mesh_local, winding_number};
pub use state::{attach_follow, caging_test, step_grasp_state, GraspPhase, GraspSession, GraspState};
