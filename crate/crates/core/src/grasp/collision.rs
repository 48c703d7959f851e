//! Capsule-and-box hand model and its penetration points against object meshes.

use nalgebra::Translation3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::segment_triangle_closest;
use crate::kinematics::{Finger, HandGeometry, HandState, PHALANX_COUNT};
use crate::math::{Pose, Vec3};

use super::mesh::ObjectMesh;
use super::query::{closest_point_on_mesh, point_in_mesh_local};

/// Haptic/collision id of the palm; phalanges use 0..14.
pub const PALM_ID: usize = PHALANX_COUNT;
pub const HAPTIC_CHANNELS: usize = PHALANX_COUNT + 1;
pub const DEFAULT_CAPSULE_RADIUS: f64 = 0.008;

/// Samples along a capsule axis used to find its deepest interior point.
const AXIS_SAMPLES: usize = 33;
/// Grid resolution per palm-box edge for surface samples.
const BOX_SAMPLES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
    pub phalanx: usize,
}

/// Oriented box; `pose` places the box centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PalmBox {
    pub pose: Pose,
    pub half_extents: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandCollisionModel {
    pub capsules: Vec<Capsule>,
    pub palm: Option<PalmBox>,
}

impl HandCollisionModel {
    /// World-frame model: one capsule per phalanx between consecutive joints, and the
    /// palm as a slab behind the palm frame's `z = 0` plane.
    pub fn from_state(geometry: &HandGeometry, state: &HandState, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("capsule radius {radius} must be > 0")));
        }
        let mut capsules = Vec::with_capacity(PHALANX_COUNT);
        for f in Finger::ALL {
            let joints = state.finger_joints(geometry, f);
            for (s, w) in joints.windows(2).enumerate() {
                capsules.push(Capsule {
                    a: state.wrist.transform_point(&w[0].into()).coords,
                    b: state.wrist.transform_point(&w[1].into()).coords,
                    radius,
                    phalanx: f.first_phalanx() + s,
                });
            }
        }
        let half = Vec3::new(
            geometry.palm_length_m / 2.0,
            geometry.palm_width_m / 2.0,
            geometry.palm_thickness_m / 2.0,
        );
        let palm = PalmBox { pose: state.wrist * Translation3::new(0.0, 0.0, -half.z), half_extents: half };
        Ok(HandCollisionModel { capsules, palm: Some(palm) })
    }

    /// Same model moved rigidly by `t`.
    pub fn transformed(&self, t: &Pose) -> Self {
        let tp = |p: &Vec3| t.transform_point(&(*p).into()).coords;
        HandCollisionModel {
            capsules: self.capsules.iter().map(|c| Capsule { a: tp(&c.a), b: tp(&c.b), ..*c }).collect(),
            palm: self.palm.map(|b| PalmBox { pose: t * b.pose, ..b }),
        }
    }
}

/// Deepest penetration of one primitive, on the mesh surface, world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionPoint {
    pub position: Vec3,
    pub phalanx: usize,
    pub depth: f64,
}

fn bounds_overlap(lo: &Vec3, hi: &Vec3, plo: &Vec3, phi: &Vec3) -> bool {
    (0..3).all(|k| plo[k] <= hi[k] && phi[k] >= lo[k])
}

/// `(depth, witness)` of a capsule in mesh-local coordinates.
fn capsule_penetration(mesh: &ObjectMesh, a: &Vec3, b: &Vec3, r: f64) -> Result<Option<(f64, Vec3)>> {
    let (lo, hi) = mesh.bounds();
    let pad = Vec3::repeat(r);
    if !bounds_overlap(&lo, &hi, &(a.inf(b) - pad), &(a.sup(b) + pad)) {
        return Ok(None);
    }
    let mut nearest = (f64::INFINITY, Vec3::zeros(), Vec3::zeros());
    for i in 0..mesh.triangles.len() {
        let [p, q, s] = mesh.corners(i);
        let c = segment_triangle_closest(a, b, &p, &q, &s);
        if c.0 < nearest.0 {
            nearest = c;
        }
    }
    let crosses = nearest.0 == 0.0;
    if !crosses && !point_in_mesh_local(mesh, a)? {
        return Ok((nearest.0 < r).then_some((r - nearest.0, nearest.2)));
    }
    let mut deepest: Option<(f64, Vec3)> = None;
    for k in 0..AXIS_SAMPLES {
        let x = a + (b - a) * (k as f64 / (AXIS_SAMPLES - 1) as f64);
        if point_in_mesh_local(mesh, &x)? {
            let (d, q) = closest_point_on_mesh(mesh, &x);
            if deepest.is_none_or(|(best, _)| d > best) {
                deepest = Some((d, q));
            }
        }
    }
    Ok(Some(match deepest {
        Some((d, q)) => (r + d, q),
        None => (r, nearest.2),
    }))
}

/// `(depth, witness)` of the palm box in mesh-local coordinates.
fn box_penetration(mesh: &ObjectMesh, b: &PalmBox) -> Result<Option<(f64, Vec3)>> {
    let local = mesh.pose.inverse() * b.pose;
    let h = b.half_extents;
    let mut deepest: Option<(f64, Vec3)> = None;
    let mut consider = |d: f64, q: Vec3| {
        if deepest.is_none_or(|(best, _)| d > best) {
            deepest = Some((d, q));
        }
    };
    for v in &mesh.vertices {
        let q = local.inverse_transform_point(&(*v).into()).coords;
        let slack = h - q.abs();
        let d = slack.min();
        if d >= 0.0 {
            consider(d, *v);
        }
    }
    let n = BOX_SAMPLES;
    let step = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if ![i, j, k].iter().any(|&x| x == 0 || x == n - 1) {
                    continue;
                }
                let q = Vec3::new(step(i) * h.x, step(j) * h.y, step(k) * h.z);
                let x = local.transform_point(&q.into()).coords;
                if point_in_mesh_local(mesh, &x)? {
                    let (d, w) = closest_point_on_mesh(mesh, &x);
                    consider(d, w);
                }
            }
        }
    }
    Ok(deepest)
}

/// One point per penetrating primitive (capsules in phalanx order, then the palm).
pub fn detect_collisions(hand: &HandCollisionModel, mesh: &ObjectMesh) -> Result<Vec<CollisionPoint>> {
    mesh.require_watertight()?;
    mesh.check_degenerate()?;
    let mut out = Vec::new();
    for c in &hand.capsules {
        let a = mesh.to_local(&c.a);
        let b = mesh.to_local(&c.b);
        if let Some((depth, q)) = capsule_penetration(mesh, &a, &b, c.radius)? {
            out.push(CollisionPoint { position: mesh.to_world(&q), phalanx: c.phalanx, depth });
        }
    }
    if let Some(palm) = &hand.palm {
        if let Some((depth, q)) = box_penetration(mesh, palm)? {
            out.push(CollisionPoint { position: mesh.to_world(&q), phalanx: PALM_ID, depth });
        }
    }
    Ok(out)
}
