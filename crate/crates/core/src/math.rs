//! Rotation and rigid-pose helpers shared by every module.

use nalgebra::{Isometry3, Quaternion as RawQuaternion, Translation3, Unit, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Unit quaternion; construction through [`quat_from_wxyz`] normalizes.
pub type Quaternion = UnitQuaternion<f64>;

/// Rigid transform (rotation + translation in metres).
pub type Pose = Isometry3<f64>;

/// Builds a unit quaternion from `[w, x, y, z]`, normalizing on the way in.
pub fn quat_from_wxyz(q: [f64; 4]) -> Result<Quaternion> {
    if q.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite quaternion {q:?}")));
    }
    let raw = RawQuaternion::new(q[0], q[1], q[2], q[3]);
    if raw.norm() < 1e-12 {
        return Err(Error::InvalidArgument("zero-norm quaternion".into()));
    }
    Ok(UnitQuaternion::from_quaternion(raw))
}

pub fn quat_to_wxyz(q: &Quaternion) -> [f64; 4] {
    [q.w, q.i, q.j, q.k]
}

/// `[w, x, y, z, px, py, pz]` to a pose.
pub fn pose_from_array(a: [f64; 7]) -> Result<Pose> {
    let rot = quat_from_wxyz([a[0], a[1], a[2], a[3]])?;
    if a[4..].iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite translation".into()));
    }
    Ok(Isometry3::from_parts(Translation3::new(a[4], a[5], a[6]), rot))
}

pub fn pose_to_array(p: &Pose) -> [f64; 7] {
    let q = quat_to_wxyz(&p.rotation);
    let t = p.translation.vector;
    [q[0], q[1], q[2], q[3], t.x, t.y, t.z]
}

pub fn pose_from_slice(s: &[f64]) -> Result<Pose> {
    let a: [f64; 7] = s
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("pose needs 7 numbers, got {}", s.len())))?;
    pose_from_array(a)
}

pub fn rot_x(angle: f64) -> Quaternion {
    UnitQuaternion::from_axis_angle(&Vector3::x_axis(), angle)
}

pub fn rot_y(angle: f64) -> Quaternion {
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), angle)
}

pub fn rot_z(angle: f64) -> Quaternion {
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), angle)
}

pub fn rot_axis(axis: &Vec3, angle: f64) -> Quaternion {
    UnitQuaternion::from_axis_angle(&Unit::new_normalize(*axis), angle)
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Component-wise mean of tightly clustered rotations, sign-aligned to the first.
pub fn quat_mean(qs: &[Quaternion]) -> Option<Quaternion> {
    let first = qs.first()?;
    let mut acc = nalgebra::Vector4::zeros();
    for q in qs {
        let c = q.as_ref().coords;
        let sign = if c.dot(&first.as_ref().coords) < 0.0 { -1.0 } else { 1.0 };
        acc += c * sign;
    }
    if acc.norm() < 1e-12 {
        return None;
    }
    Some(UnitQuaternion::from_quaternion(RawQuaternion::from(acc)))
}
