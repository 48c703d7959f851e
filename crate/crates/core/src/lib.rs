//! Reconstruction of hand-object manipulation from glove sensor streams.
//!
//! * [`kinematics`]: link-table forward kinematics of a five-finger hand, joint limits,
//!   joint angles from IMU pairs and flat-hand calibration.
//! * [`sensor`]: glove frame streams, taxel voltage-to-force laws, synthetic IMU data
//!   and the palm/thumb/index analysis channels.
//! * [`grasp`]: capsule hand model, collision points, caging test and the grasp state
//!   machine with haptic events and contact logs.
//! * [`fem`]: implicit barrier-contact FEM with strain-threshold fracture.
//! * [`pipeline`]: configuration and the commands behind the `manugrip` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod geometry;
pub mod grasp;
pub mod kinematics;
pub mod math;
pub mod pipeline;
pub mod sensor;

pub use error::{Error, Result};
