//! Property tests over randomly generated inputs.

use std::f64::consts::{FRAC_PI_2, PI};

use manugrip::fem::barrier::{barrier, barrier_d1};
use manugrip::fem::fracture::{face_stretch_ratios, fracture_update};
use manugrip::fem::TetMesh;
use manugrip::grasp::aggregate::gaussian_fit;
use manugrip::grasp::collision::{detect_collisions, HandCollisionModel};
use manugrip::grasp::state::{attach_follow, GraspState};
use manugrip::grasp::{caging_test, closest_point_on_mesh, GraspPhase, ObjectMesh};
use manugrip::kinematics::{clamp_joint_limits, hand_fk, Finger, FingerAngles, HandAngles, HandGeometry};
use manugrip::math::{rot_axis, Pose, Vec3};
use manugrip::pipeline::{self, PipelineConfig};
use manugrip::sensor::taxel::TaxelSite;
use manugrip::sensor::{extract_channels, force_to_voltage, voltage_to_force, ForceCalibration, Scenario};
use nalgebra::Translation3;
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn pose() -> impl Strategy<Value = Pose> {
    (vec3(0.5), vec3(1.0), 0.0..2.0 * PI).prop_map(|(t, axis, angle)| {
        let axis = if axis.norm() < 1e-3 { Vec3::z() } else { axis };
        Pose::from_parts(Translation3::from(t), rot_axis(&axis, angle))
    })
}

fn finger_angles() -> impl Strategy<Value = FingerAngles> {
    (-30.0..120.0f64, -30.0..140.0f64, -30.0..120.0f64, -30.0..30.0f64)
        .prop_map(|(a, b, c, d)| clamp_joint_limits(&FingerAngles::from_degrees(a, b, c, d)))
}

fn hand_angles() -> impl Strategy<Value = HandAngles> {
    prop::array::uniform5(finger_angles()).prop_map(|fs| {
        let mut h = HandAngles::default();
        for (f, a) in Finger::ALL.into_iter().zip(fs) {
            *h.finger_mut(f) = a;
        }
        h
    })
}

proptest! {
    #[test]
    fn clamping_is_a_projection(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64) {
        let once = clamp_joint_limits(&FingerAngles::new(a, b, c, d));
        prop_assert_eq!(clamp_joint_limits(&once), once);
        prop_assert!((0.0..=FRAC_PI_2).contains(&once.theta1));
        prop_assert!(once.beta.abs() <= 15f64.to_radians() + 1e-15);
    }

    #[test]
    fn force_law_round_trips(f in 0.0..10.0f64) {
        let cal = ForceCalibration::logarithmic();
        let v = force_to_voltage(f, &cal).unwrap();
        prop_assert!((voltage_to_force(v, &cal).newtons - f).abs() < 1e-9);
        prop_assert!(force_to_voltage(f, &ForceCalibration::power()).is_err());
    }

    #[test]
    fn force_law_is_monotone(v in 0.0..20.0f64, dv in 1e-6..1.0f64) {
        for cal in [ForceCalibration::logarithmic(), ForceCalibration::power()] {
            let (lo, hi) = (voltage_to_force(v, &cal).newtons, voltage_to_force(v + dv, &cal).newtons);
            prop_assert!(hi >= lo);
            if lo > 0.0 {
                prop_assert!(hi > lo);
            }
        }
    }

    #[test]
    fn barrier_vanishes_outside_its_support(d in 1e-9..2e-3f64, dhat in 1e-5..1e-3f64) {
        let e = barrier(d, dhat);
        if d >= dhat {
            prop_assert_eq!(e, 0.0);
            prop_assert_eq!(barrier_d1(d, dhat), 0.0);
        } else {
            prop_assert!(e > 0.0);
            prop_assert!(barrier_d1(d, dhat) < 0.0);
        }
    }

    #[test]
    fn covariance_is_symmetric_psd(points in prop::collection::vec(vec3(0.1), 1..40)) {
        let (_, cov) = gaussian_fit(&points);
        prop_assert_eq!(cov, cov.transpose());
        let eig = cov.symmetric_eigen();
        prop_assert!(eig.eigenvalues.iter().all(|l| *l >= -1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collisions_move_with_the_scene(angles in hand_angles(), offset in vec3(0.04), motion in pose()) {
        let hand = HandGeometry::default();
        let state = hand_fk(&hand, &angles, Pose::translation(offset.x, offset.y, offset.z - 0.03));
        let model = HandCollisionModel::from_state(&hand, &state, 0.008).unwrap();
        let mesh = ObjectMesh::icosphere(0.04, 2);
        let base = detect_collisions(&model, &mesh).unwrap();
        let moved_mesh = mesh.clone().with_pose(motion * mesh.pose);
        let moved = detect_collisions(&model.transformed(&motion), &moved_mesh).unwrap();
        prop_assert_eq!(base.len(), moved.len());
        for (a, b) in base.iter().zip(&moved) {
            prop_assert_eq!(a.phalanx, b.phalanx);
            prop_assert!((a.depth - b.depth).abs() < 1e-9);
            // Witnesses can tie between triangles, so check surface membership of each.
            prop_assert!(closest_point_on_mesh(&mesh, &a.position).0 < 1e-12);
            prop_assert!(closest_point_on_mesh(&mesh, &moved_mesh.to_local(&b.position)).0 < 1e-12);
        }
    }

    #[test]
    fn caging_ignores_contact_order(angles in hand_angles(), offset in vec3(0.03), seed in any::<u64>()) {
        let hand = HandGeometry::default();
        let state = hand_fk(&hand, &angles, Pose::translation(offset.x, offset.y, offset.z - 0.03));
        let model = HandCollisionModel::from_state(&hand, &state, 0.008).unwrap();
        let mesh = ObjectMesh::cube(0.03);
        let mut hits = detect_collisions(&model, &mesh).unwrap();
        prop_assume!(hits.len() > 1);
        let want = caging_test(&hits, &mesh).unwrap();
        let k = (seed as usize) % hits.len();
        hits.rotate_left(k);
        hits.reverse();
        prop_assert_eq!(caging_test(&hits, &mesh).unwrap(), want);
    }

    #[test]
    fn attached_object_keeps_its_hand_offset(grab in pose(), attach in pose(), later in pose()) {
        let mut state = GraspState::default();
        state.phase = GraspPhase::Caged;
        state.attachment = Some(attach);
        let at_grab = attach_follow(&state, &grab).unwrap();
        let at_later = attach_follow(&state, &later).unwrap();
        let rel_grab = (grab.inverse() * at_grab).to_homogeneous();
        let rel_later = (later.inverse() * at_later).to_homogeneous();
        prop_assert!((rel_grab - rel_later).abs().max() < 1e-12);
        prop_assert!(attach_follow(&GraspState::default(), &grab).is_err());
    }

    #[test]
    fn stretch_and_fracture_ignore_rigid_motion(seed in prop::collection::vec(vec3(1.5e-3), 27), motion in pose()) {
        let mesh = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(0.01), [2, 2, 2]).unwrap();
        let x: Vec<Vec3> = mesh.rest.iter().zip(&seed).map(|(p, d)| p + d).collect();
        let moved: Vec<Vec3> = x.iter().map(|p| motion.transform_point(&(*p).into()).coords).collect();
        for ((fa, a), (fb, b)) in face_stretch_ratios(&x, &mesh).unwrap().iter().zip(&face_stretch_ratios(&moved, &mesh).unwrap()) {
            prop_assert_eq!(fa, fb);
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
        let none = Default::default();
        prop_assert_eq!(fracture_update(&x, &mesh, 1.1, &none).unwrap(), fracture_update(&moved, &mesh, 1.1, &none).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn palm_channel_ignores_taxel_order_within_the_grid(perm in Just((0..16).collect::<Vec<usize>>()).prop_shuffle()) {
        let config = PipelineConfig::default();
        let frames = pipeline::synth_frames(&config, Scenario::PressLid).unwrap();
        let want = extract_channels(&frames, &config.taxels, &config.force, &config.hand).unwrap();
        // Palm taxel k moves to voltage slot perm[k]; frames are rewritten to match.
        let mut layout = config.taxels.clone();
        for (t, p) in layout.taxels[..16].iter_mut().zip(&perm) {
            let is_palm = matches!(t.site, TaxelSite::Palm { .. });
            prop_assert!(is_palm);
            t.id = *p;
        }
        let frames: Vec<_> = frames
            .into_iter()
            .map(|mut f| {
                let old = f.taxel.clone();
                for (k, p) in perm.iter().enumerate() {
                    f.taxel[*p] = old[k];
                }
                f
            })
            .collect();
        let got = extract_channels(&frames, &layout, &config.force, &config.hand).unwrap();
        prop_assert_eq!(&got.thumb_tip_force_n, &want.thumb_tip_force_n);
        prop_assert_eq!(&got.index_mcp_flexion_deg, &want.index_mcp_flexion_deg);
        for (a, b) in got.palm_force_n.iter().zip(&want.palm_force_n) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
