//! Five-finger kinematic hand: geometry, joint angles, limits and forward kinematics.
//!
//! Palm frame: origin at the palm centre, +x toward the fingers, +z out of the
//! palmar side. With the link table used here, positive flexion curls a finger
//! toward +z.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Isometry3, Translation3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{rot_x, rot_z, Pose, Quaternion, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl Finger {
    pub const ALL: [Finger; 5] = [Finger::Thumb, Finger::Index, Finger::Middle, Finger::Ring, Finger::Little];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn segment_count(self) -> usize {
        if self == Finger::Thumb {
            2
        } else {
            3
        }
    }

    /// Index of this finger's first phalanx in the 14-entry phalanx list.
    pub fn first_phalanx(self) -> usize {
        match self {
            Finger::Thumb => 0,
            f => 2 + 3 * (f.index() - 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Finger::Thumb => "thumb",
            Finger::Index => "index",
            Finger::Middle => "middle",
            Finger::Ring => "ring",
            Finger::Little => "little",
        }
    }
}

/// Number of phalanx segments in the hand (4 fingers x 3 + thumb x 2).
pub const PHALANX_COUNT: usize = 14;

/// Finger of a phalanx id and the segment index within that finger.
pub fn phalanx_finger(id: usize) -> Option<(Finger, usize)> {
    match id {
        0 | 1 => Some((Finger::Thumb, id)),
        2..=13 => {
            let k = id - 2;
            Some((Finger::ALL[1 + k / 3], k % 3))
        }
        _ => None,
    }
}

pub fn phalanx_name(id: usize) -> String {
    const SEG: [&str; 3] = ["proximal", "middle", "distal"];
    match phalanx_finger(id) {
        Some((Finger::Thumb, 0)) => "thumb-proximal".into(),
        Some((Finger::Thumb, _)) => "thumb-distal".into(),
        Some((f, s)) => format!("{}-{}", f.name(), SEG[s]),
        None if id == PHALANX_COUNT => "palm".into(),
        None => format!("unknown-{id}"),
    }
}

/// Segment lengths and MCP placement of one finger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerGeometry {
    pub l1_m: f64,
    pub l2_m: f64,
    /// Absent for the two-segment thumb.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l3_m: Option<f64>,
    /// Palm-centre to MCP offsets.
    pub dx_m: f64,
    pub dy_m: f64,
    /// Fixed rotation of the finger base about the palm normal.
    #[serde(default)]
    pub yaw_rad: f64,
}

impl FingerGeometry {
    pub fn lengths(&self) -> Vec<f64> {
        let mut v = vec![self.l1_m, self.l2_m];
        v.extend(self.l3_m);
        v
    }

    pub fn total_length(&self) -> f64 {
        self.lengths().iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        for l in self.lengths() {
            if !(l > 0.0 && l < 0.2) {
                return Err(Error::InvalidArgument(format!("phalanx length {l} m outside (0, 0.2)")));
            }
        }
        if !(self.dx_m.is_finite() && self.dy_m.is_finite() && self.yaw_rad.is_finite()) {
            return Err(Error::InvalidArgument("non-finite MCP offset".into()));
        }
        Ok(())
    }

    /// Palm-centre to MCP transform.
    pub fn base(&self) -> Pose {
        Isometry3::from_parts(Translation3::new(self.dx_m, self.dy_m, 0.0), rot_z(self.yaw_rad))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandGeometry {
    /// Thumb, index, middle, ring, little.
    pub fingers: [FingerGeometry; 5],
    pub palm_length_m: f64,
    pub palm_width_m: f64,
    pub palm_thickness_m: f64,
}

impl Default for HandGeometry {
    fn default() -> Self {
        let finger = |dy: f64| FingerGeometry {
            l1_m: 0.045,
            l2_m: 0.025,
            l3_m: Some(0.020),
            dx_m: 0.04,
            dy_m: dy,
            yaw_rad: 0.0,
        };
        HandGeometry {
            fingers: [
                FingerGeometry {
                    l1_m: 0.035,
                    l2_m: 0.030,
                    l3_m: None,
                    dx_m: -0.01,
                    dy_m: 0.045,
                    yaw_rad: std::f64::consts::FRAC_PI_4,
                },
                finger(0.03),
                finger(0.01),
                finger(-0.01),
                finger(-0.03),
            ],
            palm_length_m: 0.08,
            palm_width_m: 0.08,
            palm_thickness_m: 0.02,
        }
    }
}

impl HandGeometry {
    pub fn finger(&self, f: Finger) -> &FingerGeometry {
        &self.fingers[f.index()]
    }

    pub fn validate(&self) -> Result<()> {
        for f in Finger::ALL {
            let g = self.finger(f);
            g.validate()?;
            if (f == Finger::Thumb) != g.l3_m.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "{} must have {} segments",
                    f.name(),
                    f.segment_count()
                )));
            }
        }
        for v in [self.palm_length_m, self.palm_width_m, self.palm_thickness_m] {
            if !(v > 0.0 && v < 0.5) {
                return Err(Error::InvalidArgument(format!("palm dimension {v} m out of range")));
            }
        }
        Ok(())
    }
}

/// Joint angles of one finger in radians. The thumb uses `theta1`, `theta2` and `beta`;
/// its `theta3` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FingerAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub beta: f64,
}

impl FingerAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, beta: f64) -> Self {
        FingerAngles { theta1, theta2, theta3, beta }
    }

    pub fn from_degrees(theta1: f64, theta2: f64, theta3: f64, beta: f64) -> Self {
        Self::new(theta1.to_radians(), theta2.to_radians(), theta3.to_radians(), beta.to_radians())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HandAngles {
    pub fingers: [FingerAngles; 5],
}

impl HandAngles {
    pub fn finger(&self, f: Finger) -> &FingerAngles {
        &self.fingers[f.index()]
    }

    pub fn finger_mut(&mut self, f: Finger) -> &mut FingerAngles {
        &mut self.fingers[f.index()]
    }

    pub fn clamped(&self) -> HandAngles {
        HandAngles { fingers: self.fingers.map(|a| clamp_joint_limits(&a)) }
    }
}

/// Anatomical joint ranges, degrees at the boundary and radians inside.
pub struct JointLimits;

impl JointLimits {
    pub const THETA1_DEG: (f64, f64) = (0.0, 90.0);
    pub const BETA_DEG: (f64, f64) = (-15.0, 15.0);
    pub const THETA2_DEG: (f64, f64) = (0.0, 110.0);
    pub const THETA3_DEG: (f64, f64) = (0.0, 90.0);

    pub fn rad(range: (f64, f64)) -> (f64, f64) {
        (range.0.to_radians(), range.1.to_radians())
    }
}

/// Clamps each joint into its anatomical range. Values inside are returned untouched.
pub fn clamp_joint_limits(angles: &FingerAngles) -> FingerAngles {
    let clamp = |v: f64, r: (f64, f64)| {
        let (lo, hi) = JointLimits::rad(r);
        v.clamp(lo, hi)
    };
    FingerAngles {
        theta1: clamp(angles.theta1, JointLimits::THETA1_DEG),
        theta2: clamp(angles.theta2, JointLimits::THETA2_DEG),
        theta3: clamp(angles.theta3, JointLimits::THETA3_DEG),
        beta: clamp(angles.beta, JointLimits::BETA_DEG),
    }
}

/// Pose of a phalanx frame in the palm frame.
pub type PhalanxPose = Pose;

/// One link of the finger table as `(alpha_prev, a_prev, theta, d)`.
fn link_params(geometry: &FingerGeometry, angles: &FingerAngles) -> Vec<(f64, f64, f64, f64)> {
    let mut links = vec![
        (0.0, 0.0, angles.beta, 0.0),
        (FRAC_PI_2, geometry.l1_m, angles.theta1, 0.0),
        (0.0, geometry.l2_m, angles.theta2, 0.0),
    ];
    if let Some(l3) = geometry.l3_m {
        links.push((0.0, l3, angles.theta3, 0.0));
    }
    links
}

fn link_isometry(alpha: f64, a: f64, theta: f64, d: f64) -> Pose {
    Isometry3::from_parts(Translation3::new(a, 0.0, 0.0), rot_x(alpha))
        * Isometry3::from_parts(Translation3::new(0.0, 0.0, d), rot_z(theta))
}

/// Phalanx frames of one finger in the palm frame, proximal first.
///
/// Frame k is the product of the base offset with links `0..=k+1`; the last frame's
/// origin is the fingertip.
pub fn finger_fk(geometry: &FingerGeometry, angles: &FingerAngles) -> Vec<PhalanxPose> {
    let mut t = geometry.base();
    let mut out = Vec::with_capacity(3);
    for (i, (alpha, a, theta, d)) in link_params(geometry, angles).into_iter().enumerate() {
        t *= link_isometry(alpha, a, theta, d);
        if i >= 1 {
            out.push(t);
        }
    }
    out
}

pub fn mcp_position(geometry: &FingerGeometry) -> Vec3 {
    Vec3::new(geometry.dx_m, geometry.dy_m, 0.0)
}

pub fn fingertip(geometry: &FingerGeometry, angles: &FingerAngles) -> Vec3 {
    finger_fk(geometry, angles).last().expect("at least two phalanges").translation.vector
}

/// Palm-aligned axes of the IMU riding on a phalanx frame (x along the bone, z palmar).
pub fn imu_mount() -> Quaternion {
    rot_x(-FRAC_PI_2)
}

/// Flat-hand IMU orientations relative to the palm, in glove order.
pub fn canonical_imu_orientations(geometry: &HandGeometry) -> [Quaternion; 15] {
    let mut out = [Quaternion::identity(); 15];
    for f in Finger::ALL {
        for s in 0..f.segment_count() {
            out[1 + f.first_phalanx() + s] = rot_z(geometry.finger(f).yaw_rad);
        }
    }
    out
}

/// Reconstructed hand: angles plus every phalanx frame in the palm and world frames.
#[derive(Debug, Clone)]
pub struct HandState {
    pub angles: HandAngles,
    /// 14 phalanx frames in the palm frame.
    pub phalanges: Vec<PhalanxPose>,
    /// Palm frame in the world.
    pub wrist: Pose,
}

impl HandState {
    pub fn world_phalanx(&self, id: usize) -> Pose {
        self.wrist * self.phalanges[id]
    }

    /// Joint positions of one finger in the palm frame: MCP, then every phalanx frame origin.
    pub fn finger_joints(&self, geometry: &HandGeometry, f: Finger) -> Vec<Vec3> {
        let mut pts = vec![mcp_position(geometry.finger(f))];
        let first = f.first_phalanx();
        pts.extend((0..f.segment_count()).map(|s| self.phalanges[first + s].translation.vector));
        pts
    }

    pub fn world_fingertip(&self, f: Finger) -> Vec3 {
        let id = f.first_phalanx() + f.segment_count() - 1;
        self.world_phalanx(id).translation.vector
    }
}

/// Forward kinematics of the whole hand. Angles are used as given.
pub fn hand_fk(geometry: &HandGeometry, angles: &HandAngles, wrist: Pose) -> HandState {
    let mut phalanges = Vec::with_capacity(PHALANX_COUNT);
    for f in Finger::ALL {
        phalanges.extend(finger_fk(geometry.finger(f), angles.finger(f)));
    }
    HandState { angles: *angles, phalanges, wrist }
}

/// World-frame IMU orientations produced by a hand pose, in glove order.
pub fn imu_orientations(state: &HandState) -> [Quaternion; 15] {
    let mut out = [state.wrist.rotation; 15];
    for (i, p) in state.phalanges.iter().enumerate() {
        out[i + 1] = state.wrist.rotation * p.rotation * imu_mount();
    }
    out
}
