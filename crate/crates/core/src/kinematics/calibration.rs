//! Flat-hand calibration: cancels each IMU's world-side offset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{quat_from_wxyz, quat_to_wxyz, Quaternion};
use crate::sensor::{GloveFrame, IMU_COUNT};

use super::hand::{canonical_imu_orientations, HandGeometry};

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReference {
    pub corrections: Vec<Quaternion>,
}

impl CalibrationReference {
    pub fn identity() -> Self {
        CalibrationReference { corrections: vec![Quaternion::identity(); IMU_COUNT] }
    }

    pub fn inverse(&self) -> Self {
        CalibrationReference { corrections: self.corrections.iter().map(|q| q.inverse()).collect() }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CalibrationFile { corrections: self.corrections.iter().map(quat_to_wxyz).collect() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CalibrationFile = serde_json::from_str(s)?;
        if file.corrections.len() != IMU_COUNT {
            return Err(Error::LayoutMismatch(format!(
                "calibration has {} corrections, expected {IMU_COUNT}",
                file.corrections.len()
            )));
        }
        let corrections = file.corrections.into_iter().map(quat_from_wxyz).collect::<Result<_>>()?;
        Ok(CalibrationReference { corrections })
    }
}

#[derive(Serialize, Deserialize)]
struct CalibrationFile {
    corrections: Vec<[f64; 4]>,
}

/// Records the flat-hand orientations and returns the corrections that map them
/// back onto the canonical flat hand.
pub fn build_calibration(geometry: &HandGeometry, flat: &GloveFrame) -> Result<CalibrationReference> {
    build_calibration_from(geometry, &flat.imu)
}

pub fn build_calibration_from(geometry: &HandGeometry, flat_imu: &[Quaternion]) -> Result<CalibrationReference> {
    if flat_imu.len() != IMU_COUNT {
        return Err(Error::IncompleteFrame(format!(
            "calibration frame has {} IMU samples, expected {IMU_COUNT}",
            flat_imu.len()
        )));
    }
    let canonical = canonical_imu_orientations(geometry);
    let corrections = flat_imu.iter().zip(canonical.iter()).map(|(raw, c)| c * raw.inverse()).collect();
    Ok(CalibrationReference { corrections })
}

/// Left-multiplies every IMU orientation by its correction; everything else passes through.
pub fn apply_calibration(reference: &CalibrationReference, raw: &GloveFrame) -> Result<GloveFrame> {
    if raw.imu.len() != IMU_COUNT || reference.corrections.len() != IMU_COUNT {
        return Err(Error::LayoutMismatch(format!(
            "frame has {} IMUs and calibration {}, both must be {IMU_COUNT}",
            raw.imu.len(),
            reference.corrections.len()
        )));
    }
    let mut out = raw.clone();
    for (q, c) in out.imu.iter_mut().zip(&reference.corrections) {
        *q = c * *q;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::joints::hand_angles_from_imus;
    use crate::math::{rot_axis, Pose, Vec3};

    fn frame_with(imu: Vec<Quaternion>) -> GloveFrame {
        GloveFrame { t: 0.0, imu, taxel: vec![0.1; 26], wrist: Pose::identity(), tool: None }
    }

    #[test]
    fn canonical_frame_gives_identity_corrections() {
        let g = HandGeometry::default();
        let f = frame_with(canonical_imu_orientations(&g).to_vec());
        let c = build_calibration(&g, &f).unwrap();
        assert!(c.corrections.iter().all(|q| q.angle() < 1e-12));
    }

    #[test]
    fn rotated_imu_gets_inverse_correction() {
        let g = HandGeometry::default();
        let mut imu = canonical_imu_orientations(&g).to_vec();
        let q = rot_axis(&Vec3::new(0.2, 1.0, -0.4), 0.9);
        imu[5] = q * imu[5];
        let c = build_calibration(&g, &frame_with(imu)).unwrap();
        assert!(c.corrections[5].angle_to(&q.inverse()) < 1e-12);
    }

    #[test]
    fn constant_offsets_cancel_in_joint_angles() {
        let g = HandGeometry::default();
        let mut imu = canonical_imu_orientations(&g).to_vec();
        for (k, q) in imu.iter_mut().enumerate() {
            let off = rot_axis(&Vec3::new(k as f64 + 1.0, 2.0 - k as f64, 0.5), 0.05 * (k as f64 + 1.0));
            *q = off * *q;
        }
        let flat = frame_with(imu);
        let c = build_calibration(&g, &flat).unwrap();
        let corrected = apply_calibration(&c, &flat).unwrap();
        let a = hand_angles_from_imus(&g, &corrected.imu).unwrap();
        for f in a.fingers {
            for v in [f.theta1, f.theta2, f.theta3, f.beta] {
                assert!(v.abs() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_reference_is_a_no_op() {
        let g = HandGeometry::default();
        let f = frame_with(canonical_imu_orientations(&g).to_vec());
        let out = apply_calibration(&CalibrationReference::identity(), &f).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn layout_errors() {
        let g = HandGeometry::default();
        assert!(matches!(
            build_calibration(&g, &frame_with(vec![Quaternion::identity(); 14])),
            Err(Error::IncompleteFrame(_))
        ));
        assert!(matches!(
            apply_calibration(&CalibrationReference::identity(), &frame_with(vec![Quaternion::identity(); 3])),
            Err(Error::LayoutMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = CalibrationReference {
            corrections: (0..15).map(|k| rot_axis(&Vec3::new(1.0, k as f64, 0.3), 0.1 * k as f64)).collect(),
        };
        let back = CalibrationReference::from_json(&c.to_json().unwrap()).unwrap();
        for (a, b) in c.corrections.iter().zip(&back.corrections) {
            assert!(a.angle_to(b) < 1e-12);
        }
    }
}
