//! Inside/outside and closest-point queries against closed meshes.

use crate::error::Result;
use crate::geometry::{closest_point_on_triangle, ray_triangle_intersection};
use crate::math::Vec3;

use super::mesh::ObjectMesh;

/// Relative tolerance (of the mesh diagonal) under which a point counts as on the surface.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Closest surface point to a local-frame point: `(distance, point)`.
pub fn closest_point_on_mesh(mesh: &ObjectMesh, p: &Vec3) -> (f64, Vec3) {
    let mut best = (f64::INFINITY, *p);
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.corners(i);
        let q = closest_point_on_triangle(p, &a, &b, &c).0;
        let d = (q - p).norm();
        if d < best.0 {
            best = (d, q);
        }
    }
    best
}

/// Directions tried in turn; chosen to avoid alignment with axis-aligned geometry.
const RAY_DIRECTIONS: [[f64; 3]; 6] = [
    [0.5773, 0.5775, 0.5771],
    [-0.3137, 0.8409, 0.4413],
    [0.7071, -0.1234, -0.6961],
    [-0.6180, -0.5523, 0.5595],
    [0.2417, 0.1093, -0.9641],
    [-0.9013, 0.3221, -0.2894],
];

/// Crossing count along `dir`, or `None` when a hit grazes an edge or vertex.
fn crossings(mesh: &ObjectMesh, p: &Vec3, dir: &Vec3) -> Option<usize> {
    const EDGE_EPS: f64 = 1e-9;
    let mut count = 0;
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.corners(i);
        if let Some(hit) = ray_triangle_intersection(p, dir, &a, &b, &c) {
            let w = 1.0 - hit.u - hit.v;
            if hit.u < EDGE_EPS || hit.v < EDGE_EPS || w < EDGE_EPS {
                return None;
            }
            count += 1;
        }
    }
    Some(count)
}

/// Generalized winding number of a closed mesh about `p` (1 inside, 0 outside).
pub fn winding_number(mesh: &ObjectMesh, p: &Vec3) -> f64 {
    let mut total = 0.0;
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.corners(i);
        let (a, b, c) = (a - p, b - p, c - p);
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Inside test for a point in the mesh's local frame; points on the surface are inside.
pub fn point_in_mesh_local(mesh: &ObjectMesh, p: &Vec3) -> Result<bool> {
    mesh.require_watertight()?;
    mesh.check_degenerate()?;
    let (d, _) = closest_point_on_mesh(mesh, p);
    if d <= BOUNDARY_TOLERANCE * mesh.diagonal() {
        return Ok(true);
    }
    for dir in RAY_DIRECTIONS {
        if let Some(n) = crossings(mesh, p, &Vec3::from(dir)) {
            return Ok(n % 2 == 1);
        }
    }
    Ok(winding_number(mesh, p) > 0.5)
}

/// Inside test for a world-frame point against the posed mesh.
pub fn point_in_mesh(p: &Vec3, mesh: &ObjectMesh) -> Result<bool> {
    point_in_mesh_local(mesh, &mesh.to_local(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::math::{rot_axis, Pose};
    use nalgebra::Translation3;

    #[test]
    fn unit_cube_examples() {
        let cube = ObjectMesh::cube(0.5);
        assert!(point_in_mesh(&Vec3::zeros(), &cube).unwrap());
        assert!(!point_in_mesh(&Vec3::new(2.0, 0.0, 0.0), &cube).unwrap());
        assert!(point_in_mesh(&Vec3::new(0.5, 0.1, 0.2), &cube).unwrap());
        assert!(point_in_mesh(&Vec3::new(0.5, 0.5, 0.5), &cube).unwrap());
        assert!(!point_in_mesh(&Vec3::new(0.5 + 1e-6, 0.0, 0.0), &cube).unwrap());
    }

    #[test]
    fn axis_aligned_rays_through_edges_are_handled() {
        let cube = ObjectMesh::cube(0.5);
        // Points on the diagonal plane, where naive +x rays hit shared triangle edges.
        for k in 0..20 {
            let s = -0.45 + 0.045 * k as f64;
            assert!(point_in_mesh(&Vec3::new(s, s, s), &cube).unwrap());
            assert!(!point_in_mesh(&Vec3::new(s + 2.0, s, s), &cube).unwrap());
        }
    }

    #[test]
    fn posed_mesh_uses_its_pose() {
        let pose = Pose::from_parts(Translation3::new(3.0, 0.0, 0.0), rot_axis(&Vec3::z(), 0.3));
        let cube = ObjectMesh::cube(0.5).with_pose(pose);
        assert!(point_in_mesh(&Vec3::new(3.0, 0.0, 0.0), &cube).unwrap());
        assert!(!point_in_mesh(&Vec3::zeros(), &cube).unwrap());
    }

    #[test]
    fn cup_cavity_is_outside() {
        let cup = ObjectMesh::cup(0.04, 0.1, 0.008, 32);
        assert!(!point_in_mesh(&Vec3::new(0.0, 0.0, 0.05), &cup).unwrap());
        assert!(point_in_mesh(&Vec3::new(0.036, 0.0, 0.05), &cup).unwrap());
        assert!(point_in_mesh(&Vec3::new(0.0, 0.0, 0.004), &cup).unwrap());
    }

    #[test]
    fn winding_number_values() {
        let s = ObjectMesh::icosphere(1.0, 1);
        assert!((winding_number(&s, &Vec3::zeros()) - 1.0).abs() < 1e-9);
        assert!(winding_number(&s, &Vec3::new(3.0, 0.1, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn open_mesh_errors() {
        let mut m = ObjectMesh::cube(0.5);
        m.triangles.pop();
        let m = ObjectMesh::new(m.vertices, m.triangles).unwrap();
        assert!(matches!(point_in_mesh(&Vec3::zeros(), &m), Err(Error::NotWatertight(_))));
    }

    #[test]
    fn closest_point_on_face() {
        let cube = ObjectMesh::cube(0.5);
        let (d, q) = closest_point_on_mesh(&cube, &Vec3::new(0.8, 0.1, -0.2));
        assert!((d - 0.3).abs() < 1e-12);
        assert!((q - Vec3::new(0.5, 0.1, -0.2)).norm() < 1e-12);
    }
}
