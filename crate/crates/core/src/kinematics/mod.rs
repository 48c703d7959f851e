//! Hand reconstruction from joint angles or raw IMU orientations.

pub mod calibration;
pub mod dh;
pub mod hand;
pub mod joints;

pub use calibration::{apply_calibration, build_calibration, build_calibration_from, CalibrationReference};
pub use dh::dh_transform;
pub use hand::{
    clamp_joint_limits, finger_fk, fingertip, hand_fk, imu_orientations, Finger, FingerAngles, FingerGeometry,
    HandAngles, HandGeometry, HandState, JointLimits, PhalanxPose, PHALANX_COUNT,
};
pub use joints::{hand_angles_from_imus, reconstruct_hand, relative_joint_angle, JointKind, JointRotation};
