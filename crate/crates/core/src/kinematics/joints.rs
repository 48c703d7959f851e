//! Joint angles from pairs of consecutive IMU orientations.

use crate::error::{Error, Result};
use crate::math::{rot_z, Pose, Quaternion, Vec3};
use crate::sensor::GloveFrame;

use super::hand::{clamp_joint_limits, hand_fk, Finger, FingerAngles, HandAngles, HandGeometry, HandState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    /// Two-DoF metacarpophalangeal joint: abduction about the palm normal, then flexion.
    Mcp,
    /// One-DoF interphalangeal joint.
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointRotation {
    pub flexion: f64,
    pub abduction: f64,
}

/// Decomposes `parent⁻¹ · child` into flexion (rotation taking the bone axis +x
/// toward +z) and, for the MCP, abduction about +z applied first.
pub fn relative_joint_angle(parent: &Quaternion, child: &Quaternion, kind: JointKind) -> JointRotation {
    let rel = parent.inverse() * child;
    let x = rel * Vec3::x();
    match kind {
        JointKind::Mcp => {
            let planar = x.x.hypot(x.y);
            let flexion = x.z.atan2(planar);
            let abduction = if planar > 1e-12 { x.y.atan2(x.x) } else { 0.0 };
            JointRotation { flexion, abduction }
        }
        JointKind::Hinge => JointRotation { flexion: x.z.atan2(x.x), abduction: 0.0 },
    }
}

/// Unclamped joint angles from 15 IMU orientations in glove order
/// (palm, thumb x2, index x3, middle x3, ring x3, little x3).
pub fn hand_angles_from_imus(geometry: &HandGeometry, imu: &[Quaternion]) -> Result<HandAngles> {
    if imu.len() != 15 {
        return Err(Error::LayoutMismatch(format!("expected 15 IMU orientations, got {}", imu.len())));
    }
    let mut angles = HandAngles::default();
    let palm = imu[0];
    for f in Finger::ALL {
        let first = 1 + f.first_phalanx();
        let base = palm * rot_z(geometry.finger(f).yaw_rad);
        let mcp = relative_joint_angle(&base, &imu[first], JointKind::Mcp);
        let second = relative_joint_angle(&imu[first], &imu[first + 1], JointKind::Hinge);
        let third = if f.segment_count() == 3 {
            relative_joint_angle(&imu[first + 1], &imu[first + 2], JointKind::Hinge).flexion
        } else {
            0.0
        };
        *angles.finger_mut(f) = FingerAngles::new(mcp.flexion, second.flexion, third, mcp.abduction);
    }
    Ok(angles)
}

/// Calibrated frame to a clamped, posed hand. The wrist tracker pose is taken as the palm frame.
pub fn reconstruct_hand(geometry: &HandGeometry, frame: &GloveFrame) -> Result<HandState> {
    let raw = hand_angles_from_imus(geometry, &frame.imu)?;
    let clamped = HandAngles { fingers: raw.fingers.map(|a| clamp_joint_limits(&a)) };
    Ok(hand_fk(geometry, &clamped, frame.wrist))
}

/// Reconstruction with an explicit world pose override (e.g. replayed from a script).
pub fn reconstruct_hand_at(geometry: &HandGeometry, imu: &[Quaternion], wrist: Pose) -> Result<HandState> {
    let raw = hand_angles_from_imus(geometry, imu)?;
    Ok(hand_fk(geometry, &raw.clamped(), wrist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::hand::imu_orientations;
    use crate::math::{rot_axis, rot_y};
    use std::f64::consts::FRAC_PI_2;

    fn flex(a: f64) -> Quaternion {
        rot_y(-a)
    }

    #[test]
    fn identical_orientations_give_zero() {
        let q = rot_axis(&Vec3::new(0.3, -1.0, 0.5), 1.1);
        let r = relative_joint_angle(&q, &q, JointKind::Mcp);
        assert!(r.flexion.abs() < 1e-12 && r.abduction.abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_about_flexion_axis() {
        let q = rot_axis(&Vec3::new(1.0, 2.0, -0.5), 0.4);
        for kind in [JointKind::Mcp, JointKind::Hinge] {
            let r = relative_joint_angle(&q, &(q * flex(FRAC_PI_2)), kind);
            assert!((r.flexion - FRAC_PI_2).abs() < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn abduction_then_flexion_round_trip() {
        let q = rot_axis(&Vec3::new(-0.2, 0.7, 0.1), 2.0);
        let child = q * rot_z(10f64.to_radians()) * flex(30f64.to_radians());
        let r = relative_joint_angle(&q, &child, JointKind::Mcp);
        assert!((r.flexion - 30f64.to_radians()).abs() < 1e-6);
        assert!((r.abduction - 10f64.to_radians()).abs() < 1e-6);
    }

    #[test]
    fn hinge_handles_angles_past_ninety() {
        let r = relative_joint_angle(&Quaternion::identity(), &flex(110f64.to_radians()), JointKind::Hinge);
        assert!((r.flexion - 110f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn fk_orientations_invert_to_angles() {
        let g = HandGeometry::default();
        let mut a = HandAngles::default();
        for (i, f) in Finger::ALL.iter().enumerate() {
            let k = i as f64;
            *a.finger_mut(*f) = FingerAngles::from_degrees(10.0 + 7.0 * k, 20.0 + 9.0 * k, 5.0 + 4.0 * k, -6.0 + 3.0 * k);
        }
        a.finger_mut(Finger::Thumb).theta3 = 0.0;
        let wrist = Pose::from_parts(nalgebra::Translation3::new(0.2, 0.1, 0.9), rot_axis(&Vec3::new(1.0, 1.0, 0.0), 0.8));
        let s = hand_fk(&g, &a, wrist);
        let back = hand_angles_from_imus(&g, &imu_orientations(&s)).unwrap();
        for f in Finger::ALL {
            let (x, y) = (a.finger(f), back.finger(f));
            for (u, v) in [(x.theta1, y.theta1), (x.theta2, y.theta2), (x.theta3, y.theta3), (x.beta, y.beta)] {
                assert!((u - v).abs() < 1e-9, "{f:?}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn wrong_imu_count_is_rejected() {
        let g = HandGeometry::default();
        assert!(hand_angles_from_imus(&g, &[Quaternion::identity(); 14]).is_err());
    }
}
