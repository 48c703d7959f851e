//! Forward kinematics of the default hand: fingertip positions for a few poses, and what
//! joint-limit clamping does to an out-of-range request.
//!
//! ```sh
//! cargo run --example kinematics
//! ```

use manugrip::kinematics::{clamp_joint_limits, hand_fk, Finger, FingerAngles, HandAngles, HandGeometry};
use manugrip::math::Pose;

fn degrees(a: &FingerAngles) -> String {
    let d = [a.theta1, a.theta2, a.theta3, a.beta].map(f64::to_degrees);
    format!("{:.1} / {:.1} / {:.1} / {:.1} deg", d[0], d[1], d[2], d[3])
}

fn main() {
    let geometry = HandGeometry::default();
    let curl = |t1, t2, t3| HandAngles { fingers: [FingerAngles::from_degrees(t1, t2, t3, 0.0); 5] };
    let poses = [("flat", HandAngles::default()), ("half fist", curl(45.0, 55.0, 45.0)), ("fist", curl(90.0, 110.0, 90.0))];
    for (name, angles) in &poses {
        let state = hand_fk(&geometry, angles, Pose::identity());
        println!("{name}:");
        for f in Finger::ALL {
            let tip = state.world_fingertip(f);
            println!("  {:<7} tip at ({:+.4}, {:+.4}, {:+.4}) m", f.name(), tip.x, tip.y, tip.z);
        }
    }

    let wild = FingerAngles::from_degrees(130.0, -20.0, 95.0, 30.0);
    println!("requested theta1/theta2/theta3/beta {}", degrees(&wild));
    println!("clamped   theta1/theta2/theta3/beta {}", degrees(&clamp_joint_limits(&wild)));
}
