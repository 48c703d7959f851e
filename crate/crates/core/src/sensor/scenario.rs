//! Scripted ground-truth manipulation scenarios used to synthesize glove streams.
//!
//! Every scenario opens with one second of flat hand so the stream can be
//! calibrated from its own head.

use nalgebra::{Translation3, UnitQuaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kinematics::{Finger, FingerAngles, HandAngles};
use crate::math::{rot_z, Pose, Vec3};

use super::force::{force_to_voltage, ForceCalibration};
use super::noise::HandSample;
use super::taxel::{TaxelLayout, TAXEL_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    FlatHand,
    /// Plain twist of a lid, index MCP near 50 degrees.
    TwistLid,
    /// Palm presses the lid down while twisting; fingers stay stretched.
    PressLid,
    /// Thumb and index pinch the lid before twisting.
    PinchLid,
    /// Hook grasp of a bar, carry, release.
    PickPlace,
}

impl Scenario {
    pub const ALL: [Scenario; 5] =
        [Scenario::FlatHand, Scenario::TwistLid, Scenario::PressLid, Scenario::PinchLid, Scenario::PickPlace];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FlatHand => "flat-hand",
            Scenario::TwistLid => "twist-lid",
            Scenario::PressLid => "press-lid",
            Scenario::PinchLid => "pinch-lid",
            Scenario::PickPlace => "pick-place",
        }
    }

    pub fn from_name(name: &str) -> Result<Scenario> {
        Scenario::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }
}

/// Forces on the taxels, in newtons, by region.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactForces {
    pub palm: f64,
    pub distal: [f64; 5],
    pub proximal: [f64; 5],
}

#[derive(Debug, Clone, Copy)]
struct Keyframe {
    t: f64,
    angles: HandAngles,
    wrist: Pose,
    forces: ContactForces,
}

fn hand(fingers: FingerAngles, thumb: FingerAngles) -> HandAngles {
    let mut a = HandAngles { fingers: [fingers; 5] };
    *a.finger_mut(Finger::Thumb) = FingerAngles { theta3: 0.0, ..thumb };
    a
}

fn lerp_angles(a: &HandAngles, b: &HandAngles, s: f64) -> HandAngles {
    let mut out = *a;
    for (o, (x, y)) in out.fingers.iter_mut().zip(a.fingers.iter().zip(&b.fingers)) {
        o.theta1 = x.theta1 + (y.theta1 - x.theta1) * s;
        o.theta2 = x.theta2 + (y.theta2 - x.theta2) * s;
        o.theta3 = x.theta3 + (y.theta3 - x.theta3) * s;
        o.beta = x.beta + (y.beta - x.beta) * s;
    }
    out
}

fn lerp_forces(a: &ContactForces, b: &ContactForces, s: f64) -> ContactForces {
    let l = |x: f64, y: f64| x + (y - x) * s;
    let mut out = *a;
    out.palm = l(a.palm, b.palm);
    for i in 0..5 {
        out.distal[i] = l(a.distal[i], b.distal[i]);
        out.proximal[i] = l(a.proximal[i], b.proximal[i]);
    }
    out
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

fn at(x: f64, y: f64, z: f64, yaw_deg: f64) -> Pose {
    Pose::from_parts(Translation3::new(x, y, z), rot_z(yaw_deg.to_radians()))
}

fn keyframes(scenario: Scenario) -> Vec<Keyframe> {
    let flat = HandAngles::default();
    let none = ContactForces::default();
    let home = at(0.0, 0.0, 0.1, 0.0);
    let kf = |t: f64, angles: HandAngles, wrist: Pose, forces: ContactForces| Keyframe { t, angles, wrist, forces };
    match scenario {
        Scenario::FlatHand => vec![kf(0.0, flat, home, none), kf(3.0, flat, home, none)],
        Scenario::TwistLid => {
            let grip = hand(FingerAngles::from_degrees(50.0, 35.0, 20.0, 0.0), FingerAngles::from_degrees(30.0, 25.0, 0.0, 0.0));
            let f = ContactForces { palm: 0.0, distal: [1.5, 1.6, 1.4, 1.0, 0.6], proximal: [0.2; 5] };
            vec![
                kf(0.0, flat, home, none),
                kf(1.0, flat, home, none),
                kf(1.6, grip, home, f),
                kf(3.0, grip, at(0.0, 0.0, 0.1, 60.0), f),
                kf(3.6, grip, at(0.0, 0.0, 0.1, 60.0), f),
                kf(4.4, flat, home, none),
                kf(5.0, flat, home, none),
            ]
        }
        Scenario::PressLid => {
            let stretched = hand(FingerAngles::from_degrees(5.0, 5.0, 3.0, 0.0), FingerAngles::from_degrees(5.0, 5.0, 0.0, 0.0));
            let f = ContactForces { palm: 3.5, distal: [0.0, 0.2, 0.2, 0.2, 0.1], proximal: [0.0, 0.1, 0.1, 0.1, 0.0] };
            vec![
                kf(0.0, flat, home, none),
                kf(1.0, flat, home, none),
                kf(1.5, stretched, home, f),
                kf(3.0, stretched, at(0.0, 0.0, 0.1, 45.0), f),
                kf(3.5, stretched, at(0.0, 0.0, 0.1, 45.0), f),
                kf(4.2, flat, home, none),
                kf(5.0, flat, home, none),
            ]
        }
        Scenario::PinchLid => {
            let pinch = hand(FingerAngles::from_degrees(50.0, 40.0, 25.0, 0.0), FingerAngles::from_degrees(35.0, 30.0, 0.0, 0.0));
            let squeeze = ContactForces { palm: 0.0, distal: [3.0, 2.5, 0.8, 0.4, 0.2], proximal: [0.3, 0.2, 0.0, 0.0, 0.0] };
            let twist = ContactForces { distal: [2.2, 1.8, 0.8, 0.4, 0.2], ..squeeze };
            vec![
                kf(0.0, flat, home, none),
                kf(1.0, flat, home, none),
                kf(1.6, pinch, home, squeeze),
                kf(2.6, pinch, home, squeeze),
                kf(4.0, pinch, at(0.0, 0.0, 0.1, 60.0), twist),
                kf(4.6, pinch, at(0.0, 0.0, 0.1, 60.0), twist),
                kf(5.4, flat, home, none),
                kf(6.0, flat, home, none),
            ]
        }
        Scenario::PickPlace => {
            let hook = hand(FingerAngles::from_degrees(0.0, 90.0, 90.0, 0.0), FingerAngles::from_degrees(0.0, 0.0, 0.0, 0.0));
            let f = ContactForces { palm: 0.0, distal: [0.0, 1.2, 1.2, 1.2, 1.0], proximal: [0.0; 5] };
            let start = at(-0.1, 0.0, 0.0, 0.0);
            let grasp = at(0.0, 0.0, 0.0, 0.0);
            let carried = at(0.05, 0.12, 0.1, 30.0);
            let away = at(-0.05, 0.12, 0.08, 30.0);
            vec![
                kf(0.0, flat, start, none),
                kf(1.0, flat, start, none),
                kf(2.0, flat, grasp, none),
                kf(3.0, hook, grasp, f),
                kf(4.5, hook, carried, f),
                kf(5.0, flat, carried, none),
                kf(5.8, flat, away, none),
                kf(6.0, flat, away, none),
            ]
        }
    }
}

fn interpolate(frames: &[Keyframe], t: f64) -> Keyframe {
    let last = frames.len() - 1;
    if t <= frames[0].t {
        return frames[0];
    }
    if t >= frames[last].t {
        return frames[last];
    }
    let k = frames.windows(2).position(|w| t >= w[0].t && t < w[1].t).expect("t inside keyframe span");
    let (a, b) = (&frames[k], &frames[k + 1]);
    let s = smoothstep((t - a.t) / (b.t - a.t));
    let rotation: UnitQuaternion<f64> = a.wrist.rotation.slerp(&b.wrist.rotation, s);
    let translation = a.wrist.translation.vector.lerp(&b.wrist.translation.vector, s);
    Keyframe {
        t,
        angles: lerp_angles(&a.angles, &b.angles, s),
        wrist: Pose::from_parts(Translation3::from(translation), rotation),
        forces: lerp_forces(&a.forces, &b.forces, s),
    }
}

pub fn scenario_duration(scenario: Scenario) -> f64 {
    keyframes(scenario).last().map(|k| k.t).unwrap_or(0.0)
}

/// Wrist pose of the scenario at time `t` (also used to place the tool/object of a scene).
pub fn scenario_wrist(scenario: Scenario, t: f64) -> Pose {
    interpolate(&keyframes(scenario), t).wrist
}

fn taxel_forces(layout: &TaxelLayout, forces: &ContactForces, jitter: &mut dyn FnMut() -> f64) -> [f64; TAXEL_COUNT] {
    let mut out = [0.0; TAXEL_COUNT];
    for t in &layout.taxels {
        let base = match t.site {
            super::taxel::TaxelSite::Palm { row, col } => {
                // Slightly uneven pressure over the grid.
                forces.palm * (1.0 + 0.04 * (row as f64 - 1.5) - 0.03 * (col as f64 - 1.5))
            }
            super::taxel::TaxelSite::Proximal { finger } => forces.proximal[finger.index()],
            super::taxel::TaxelSite::Distal { finger } => forces.distal[finger.index()],
        };
        out[t.id] = if base > 0.0 { (base + jitter()).max(0.0) } else { 0.0 };
    }
    out
}

/// Ground-truth samples for a scenario at `rate_hz`.
pub fn scenario_samples(
    scenario: Scenario,
    rate_hz: f64,
    layout: &TaxelLayout,
    cal: &ForceCalibration,
    seed: u64,
) -> Result<Vec<HandSample>> {
    if !(rate_hz > 0.0) {
        return Err(Error::InvalidArgument(format!("sample rate must be positive, got {rate_hz}")));
    }
    layout.validate()?;
    let frames = keyframes(scenario);
    let duration = scenario_duration(scenario);
    let n = (duration * rate_hz).floor() as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7a11);
    let normal = Normal::new(0.0, 0.02).expect("valid std");
    let mut jitter = move || normal.sample(&mut rng);
    (0..n)
        .map(|i| {
            let t = i as f64 / rate_hz;
            let k = interpolate(&frames, t);
            let taxel = taxel_forces(layout, &k.forces, &mut jitter)
                .iter()
                .map(|f| force_to_voltage(*f, cal))
                .collect::<Result<Vec<_>>>()?;
            Ok(HandSample { t, angles: k.angles, wrist: k.wrist, taxel, tool: None })
        })
        .collect()
}

/// Bar gripped by the hook grasp of [`Scenario::PickPlace`]: centre and half extents in the world.
pub fn pick_place_bar() -> (Vec3, Vec3) {
    (Vec3::new(0.0985, 0.0, 0.021), Vec3::new(0.0065, 0.04, 0.005))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::from_name(s.name()).unwrap(), s);
        }
        assert!(matches!(Scenario::from_name("juggle"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn every_scenario_starts_flat_for_a_second() {
        let layout = TaxelLayout::default();
        for s in Scenario::ALL {
            let samples = scenario_samples(s, 20.0, &layout, &ForceCalibration::logarithmic(), 0).unwrap();
            let flat: Vec<_> = samples.iter().take_while(|x| x.t <= 1.0).collect();
            assert!(flat.len() >= 10);
            assert!(flat.iter().all(|x| x.angles == HandAngles::default()));
            assert!(samples.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn zero_force_maps_to_zero_crossing_voltage() {
        let layout = TaxelLayout::default();
        let s = scenario_samples(Scenario::FlatHand, 20.0, &layout, &ForceCalibration::logarithmic(), 3).unwrap();
        assert!(s[0].taxel.iter().all(|v| (v - 1.0 / 44.98).abs() < 1e-15));
    }
}
