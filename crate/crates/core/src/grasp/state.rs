//! Caging test and the Free/Touching/Caged grasp state machine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{HandGeometry, HandState};
use crate::math::{Pose, Vec3};

use super::collision::{detect_collisions, CollisionPoint, HandCollisionModel, HAPTIC_CHANNELS};
use super::log::ContactLogEntry;
use super::mesh::ObjectMesh;
use super::query::point_in_mesh;

/// True when the unweighted mean of the collision positions lies inside (or on) the mesh.
pub fn caging_test(collisions: &[CollisionPoint], mesh: &ObjectMesh) -> Result<bool> {
    if collisions.is_empty() {
        return Err(Error::EmptyCollisions);
    }
    let sum: Vec3 = collisions.iter().map(|c| c.position).sum();
    point_in_mesh(&(sum / collisions.len() as f64), mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraspPhase {
    Free,
    Touching,
    Caged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspState {
    pub phase: GraspPhase,
    /// Object pose in the hand frame; present only while caged.
    pub attachment: Option<Pose>,
    /// Phalanges 0..14, then the palm.
    pub haptics: [bool; HAPTIC_CHANNELS],
    /// Outcome of the caging test on the latest frame, if it was evaluated.
    pub last_caging: Option<bool>,
    pending: Option<(GraspPhase, u32)>,
}

impl Default for GraspState {
    fn default() -> Self {
        GraspState {
            phase: GraspPhase::Free,
            attachment: None,
            haptics: [false; HAPTIC_CHANNELS],
            last_caging: None,
            pending: None,
        }
    }
}

/// Advances the state machine by one frame.
///
/// With `debounce = d`, a transition fires once its condition has held on `d + 1`
/// consecutive frames; `0` follows the rules frame by frame.
pub fn step_grasp_state(
    prev: &GraspState,
    collisions: &[CollisionPoint],
    mesh: &ObjectMesh,
    hand_pose: &Pose,
    debounce: u32,
) -> Result<GraspState> {
    let caging = if collisions.is_empty() { None } else { Some(caging_test(collisions, mesh)?) };
    let target = match (prev.phase, caging) {
        (_, None) => GraspPhase::Free,
        (GraspPhase::Free, Some(_)) => GraspPhase::Touching,
        (GraspPhase::Touching, Some(true)) => GraspPhase::Caged,
        (GraspPhase::Touching, Some(false)) => GraspPhase::Touching,
        (GraspPhase::Caged, Some(true)) => GraspPhase::Caged,
        (GraspPhase::Caged, Some(false)) => GraspPhase::Free,
    };
    let mut next = GraspState { last_caging: caging, ..prev.clone() };
    if target == prev.phase {
        next.pending = None;
    } else {
        let held = match prev.pending {
            Some((p, n)) if p == target => n + 1,
            _ => 1,
        };
        if held > debounce {
            next.phase = target;
            next.pending = None;
            next.attachment = (target == GraspPhase::Caged).then(|| hand_pose.inverse() * mesh.pose);
        } else {
            next.pending = Some((target, held));
        }
    }
    next.haptics = [next.phase == GraspPhase::Caged; HAPTIC_CHANNELS];
    for c in collisions {
        next.haptics[c.phalanx] = true;
    }
    Ok(next)
}

/// Object pose carried rigidly by the hand.
pub fn attach_follow(state: &GraspState, hand_pose: &Pose) -> Result<Pose> {
    match (state.phase, &state.attachment) {
        (GraspPhase::Caged, Some(att)) => Ok(hand_pose * att),
        _ => Err(Error::InvalidState(format!("attach_follow needs a caged state, got {:?}", state.phase))),
    }
}

/// Runs collision detection and the state machine over a frame sequence, moving the
/// object with the hand while it is caged.
#[derive(Debug, Clone)]
pub struct GraspSession {
    pub geometry: HandGeometry,
    pub mesh: ObjectMesh,
    pub capsule_radius: f64,
    pub debounce: u32,
    pub state: GraspState,
}

impl GraspSession {
    pub fn new(geometry: HandGeometry, mesh: ObjectMesh, capsule_radius: f64, debounce: u32) -> Result<Self> {
        mesh.require_watertight()?;
        mesh.check_degenerate()?;
        Ok(GraspSession { geometry, mesh, capsule_radius, debounce, state: GraspState::default() })
    }

    pub fn step(&mut self, t: f64, hand: &HandState) -> Result<ContactLogEntry> {
        if self.state.phase == GraspPhase::Caged {
            self.mesh.pose = attach_follow(&self.state, &hand.wrist)?;
        }
        let model = HandCollisionModel::from_state(&self.geometry, hand, self.capsule_radius)?;
        let collisions = detect_collisions(&model, &self.mesh)?;
        self.state = step_grasp_state(&self.state, &collisions, &self.mesh, &hand.wrist, self.debounce)?;
        Ok(ContactLogEntry {
            t,
            phase: self.state.phase,
            contacts: collisions,
            haptics: self.state.haptics,
            object_pose: self.mesh.pose,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rot_axis;
    use nalgebra::Translation3;

    fn point(p: Vec3, phalanx: usize) -> CollisionPoint {
        CollisionPoint { position: p, phalanx, depth: 0.001 }
    }

    #[test]
    fn caging_examples() {
        let sphere = ObjectMesh::icosphere(0.05, 2);
        let v = sphere.vertices[0];
        assert!(caging_test(&[point(v, 1), point(-v, 4)], &sphere).unwrap());
        assert!(caging_test(&[point(v, 1)], &sphere).unwrap());
        assert!(matches!(caging_test(&[], &sphere), Err(Error::EmptyCollisions)));
        let cube = ObjectMesh::cube(0.5);
        assert!(caging_test(&[point(Vec3::new(0.5, 0.1, 0.0), 2)], &cube).unwrap());
    }

    #[test]
    fn cup_rim_contacts_centre_in_cavity() {
        let cup = ObjectMesh::cup(0.04, 0.1, 0.008, 32);
        let pts: Vec<_> = (0..3)
            .map(|k| {
                let a = k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                point(Vec3::new(0.036 * a.cos(), 0.036 * a.sin(), 0.1), k)
            })
            .collect();
        assert!(!caging_test(&pts, &cup).unwrap());
    }

    #[test]
    fn transitions() {
        let mesh = ObjectMesh::icosphere(0.05, 2);
        let hand = Pose::translation(0.0, 0.0, 0.1);
        let s0 = GraspState::default();
        let s1 = step_grasp_state(&s0, &[], &mesh, &hand, 0).unwrap();
        assert_eq!(s1.phase, GraspPhase::Free);
        assert!(s1.haptics.iter().all(|h| !h));

        let v = mesh.vertices[0];
        let contacts = [point(v, 1), point(-v, 4)];
        let s2 = step_grasp_state(&s1, &contacts, &mesh, &hand, 0).unwrap();
        assert_eq!(s2.phase, GraspPhase::Touching);
        assert!(s2.attachment.is_none());
        assert!(s2.haptics[1] && s2.haptics[4] && !s2.haptics[0]);

        let s3 = step_grasp_state(&s2, &contacts, &mesh, &hand, 0).unwrap();
        assert_eq!(s3.phase, GraspPhase::Caged);
        assert!(s3.haptics.iter().all(|&h| h));
        let att = s3.attachment.unwrap();
        assert!((att.translation.vector - Vec3::new(0.0, 0.0, -0.1)).norm() < 1e-15);

        let s4 = step_grasp_state(&s3, &[], &mesh, &hand, 0).unwrap();
        assert_eq!(s4.phase, GraspPhase::Free);
        assert!(s4.attachment.is_none());
        assert!(s4.haptics.iter().all(|h| !h));
    }

    #[test]
    fn debounce_delays_transitions() {
        let mesh = ObjectMesh::icosphere(0.05, 2);
        let contacts = [point(mesh.vertices[0], 1)];
        let mut s = GraspState::default();
        let mut phases = Vec::new();
        for _ in 0..3 {
            s = step_grasp_state(&s, &contacts, &mesh, &Pose::identity(), 2).unwrap();
            phases.push(s.phase);
        }
        assert_eq!(phases, [GraspPhase::Free, GraspPhase::Free, GraspPhase::Touching]);
    }

    #[test]
    fn follow_requires_cage() {
        assert!(matches!(attach_follow(&GraspState::default(), &Pose::identity()), Err(Error::InvalidState(_))));
    }

    #[test]
    fn follow_translation_and_rotation() {
        let obj = Pose::from_parts(Translation3::new(0.05, 0.02, 0.0), rot_axis(&Vec3::x(), 0.2));
        let hand0 = Pose::translation(0.0, 0.0, 0.1);
        let st = GraspState {
            phase: GraspPhase::Caged,
            attachment: Some(hand0.inverse() * obj),
            ..GraspState::default()
        };
        let moved = attach_follow(&st, &(Pose::translation(0.1, 0.0, 0.0) * hand0)).unwrap();
        assert!((moved.translation.vector - obj.translation.vector - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-15);
        let turned = hand0 * Pose::rotation(Vec3::z() * std::f64::consts::FRAC_PI_2);
        let o = attach_follow(&st, &turned).unwrap();
        let rel = turned.inverse() * o;
        assert!((rel.to_homogeneous() - st.attachment.unwrap().to_homogeneous()).abs().max() < 1e-15);
    }
}
