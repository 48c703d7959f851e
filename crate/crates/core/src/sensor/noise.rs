//! Synthetic IMU streams with bias, Gaussian jitter and drift.
//!
//! Joint errors are injected about each IMU's flexion axis, so a joint recovered
//! from two consecutive IMUs carries `bias + N(0, std)` of error. Drift and a fixed
//! mounting offset act on the world side of each IMU and are what the flat-hand
//! calibration removes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{hand_fk, imu_orientations, Finger, HandAngles, HandGeometry};
use crate::math::{rot_axis, rot_y, Pose, Quaternion, Vec3};

use super::frame::{GloveFrame, IMU_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuNoiseModel {
    /// Constant error on every measured joint rotation; observed range is 2 to 3 degrees.
    pub bias_deg: f64,
    pub std_deg: f64,
    /// Constant-rate rotation about a random fixed axis per IMU.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift_deg_per_s: Option<f64>,
    /// Fixed world-side offset about a random axis per IMU.
    #[serde(default)]
    pub offset_deg: f64,
}

impl Default for ImuNoiseModel {
    fn default() -> Self {
        ImuNoiseModel { bias_deg: 2.5, std_deg: 1.7, drift_deg_per_s: None, offset_deg: 0.0 }
    }
}

impl ImuNoiseModel {
    pub fn noiseless() -> Self {
        ImuNoiseModel { bias_deg: 0.0, std_deg: 0.0, drift_deg_per_s: None, offset_deg: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.std_deg >= 0.0) || !self.bias_deg.is_finite() || !self.offset_deg.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid noise model {self:?}")));
        }
        if let Some(d) = self.drift_deg_per_s {
            if !d.is_finite() {
                return Err(Error::InvalidArgument("non-finite drift rate".into()));
            }
        }
        Ok(())
    }

    /// One draw of `bias + N(0, std)`, radians.
    pub fn sample_error_rad<R: Rng>(&self, rng: &mut R) -> f64 {
        let jitter = if self.std_deg > 0.0 {
            Normal::new(0.0, self.std_deg).expect("std checked non-negative").sample(rng)
        } else {
            0.0
        };
        (self.bias_deg + jitter).to_radians()
    }

    /// Orientation reported by a single IMU turned by `angle` about its flexion axis.
    pub fn measure_rotation<R: Rng>(&self, angle: f64, rng: &mut R) -> Quaternion {
        rot_y(-(angle + self.sample_error_rad(rng)))
    }
}

/// Ground-truth sample that the synthesizer turns into a glove frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HandSample {
    pub t: f64,
    pub angles: HandAngles,
    pub wrist: Pose,
    /// Taxel voltages, passed through untouched.
    pub taxel: Vec<f64>,
    pub tool: Option<Pose>,
}

struct ImuDrift {
    offset: Quaternion,
    axis: Vec3,
}

/// Deterministic glove stream for a ground-truth sequence.
pub fn synth_imu_stream(
    geometry: &HandGeometry,
    samples: &[HandSample],
    noise: &ImuNoiseModel,
    seed: u64,
) -> Result<Vec<GloveFrame>> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drift: Vec<ImuDrift> = (0..IMU_COUNT)
        .map(|_| {
            let a: [f64; 3] = UnitSphere.sample(&mut rng);
            let b: [f64; 3] = UnitSphere.sample(&mut rng);
            ImuDrift {
                offset: rot_axis(&Vec3::from(a), noise.offset_deg.to_radians()),
                axis: Vec3::from(b),
            }
        })
        .collect();
    let t0 = samples.first().map(|s| s.t).unwrap_or(0.0);
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let mut measured = s.angles;
        for f in Finger::ALL {
            let a = measured.finger_mut(f);
            a.theta1 += noise.sample_error_rad(&mut rng);
            a.theta2 += noise.sample_error_rad(&mut rng);
            if f != Finger::Thumb {
                a.theta3 += noise.sample_error_rad(&mut rng);
            }
        }
        let state = hand_fk(geometry, &measured, s.wrist);
        let mut imu = imu_orientations(&state).to_vec();
        for (q, d) in imu.iter_mut().zip(&drift) {
            let rate = noise.drift_deg_per_s.unwrap_or(0.0).to_radians();
            *q = rot_axis(&d.axis, rate * (s.t - t0)) * d.offset * *q;
        }
        out.push(GloveFrame { t: s.t, imu, taxel: s.taxel.clone(), wrist: s.wrist, tool: s.tool });
    }
    Ok(out)
}
