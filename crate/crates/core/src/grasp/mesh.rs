//! Triangle surface meshes of grasped objects: validation, generators and OBJ I/O.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::math::{Pose, Vec3};

/// Closed triangle mesh in its local frame, placed in the world by `pose`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub pose: Pose,
    watertight: bool,
}

impl ObjectMesh {
    /// Builds a mesh and records whether it is watertight and outward oriented.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= vertices.len())) {
            return Err(Error::Mesh(format!("triangle {t:?} indexes past {} vertices", vertices.len())));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Mesh("non-finite vertex".into()));
        }
        let mut m = ObjectMesh { vertices, triangles, pose: Pose::identity(), watertight: false };
        m.watertight = m.check_watertight().is_ok();
        Ok(m)
    }

    pub fn with_pose(mut self, pose: Pose) -> Self {
        self.pose = pose;
        self
    }

    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    /// Every undirected edge used by exactly two triangles with opposite orientation,
    /// and positive enclosed volume.
    pub fn check_watertight(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::NotWatertight("no triangles".into()));
        }
        let mut edges: HashMap<(usize, usize), (u32, u32)> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if a == b {
                    return Err(Error::NotWatertight(format!("triangle {t:?} repeats a vertex")));
                }
                let e = edges.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        for (edge, (fwd, back)) in edges {
            if fwd != 1 || back != 1 {
                return Err(Error::NotWatertight(format!(
                    "edge {edge:?} used {fwd} times forward and {back} times backward"
                )));
            }
        }
        if self.signed_volume() <= 0.0 {
            return Err(Error::NotWatertight("normals point inward (non-positive volume)".into()));
        }
        Ok(())
    }

    pub fn require_watertight(&self) -> Result<()> {
        if self.watertight {
            Ok(())
        } else {
            self.check_watertight()
        }
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| self.vertices[t[0]].dot(&self.vertices[t[1]].cross(&self.vertices[t[2]])) / 6.0)
            .sum()
    }

    /// Local-frame axis-aligned bounds.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    pub fn diagonal(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).norm()
    }

    /// Fails on the first triangle whose area is negligible against the mesh scale.
    pub fn check_degenerate(&self) -> Result<()> {
        let scale = self.diagonal().powi(2).max(f64::MIN_POSITIVE);
        for (i, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = self.corners(i);
            if (b - a).cross(&(c - a)).norm() <= 1e-14 * scale {
                return Err(Error::DegenerateTriangle(i));
            }
            let _ = t;
        }
        Ok(())
    }

    pub fn corners(&self, tri: usize) -> [Vec3; 3] {
        let t = self.triangles[tri];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn world_vertices(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|v| self.pose.transform_vector(v) + self.pose.translation.vector).collect()
    }

    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.pose.inverse_transform_point(&(*p).into()).coords
    }

    pub fn to_world(&self, p: &Vec3) -> Vec3 {
        self.pose.transform_point(&(*p).into()).coords
    }

    /// Axis-aligned box centred at the origin.
    pub fn cuboid(half: Vec3) -> Self {
        let v = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { -half.x } else { half.x },
                    if i & 2 == 0 { -half.y } else { half.y },
                    if i & 4 == 0 { -half.z } else { half.z },
                )
            })
            .collect();
        let t = vec![
            [0, 2, 1], [1, 2, 3], // -z
            [4, 5, 6], [5, 7, 6], // +z
            [0, 1, 4], [1, 5, 4], // -y
            [2, 6, 3], [3, 6, 7], // +y
            [0, 4, 2], [2, 4, 6], // -x
            [1, 3, 5], [3, 7, 5], // +x
        ];
        ObjectMesh::new(v, t).expect("cuboid is valid")
    }

    pub fn cube(half: f64) -> Self {
        Self::cuboid(Vec3::repeat(half))
    }

    /// Subdivided icosahedron projected to a sphere.
    pub fn icosphere(radius: f64, subdivisions: usize) -> Self {
        let p = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1.0, p, 0.0), (1.0, p, 0.0), (-1.0, -p, 0.0), (1.0, -p, 0.0),
            (0.0, -1.0, p), (0.0, 1.0, p), (0.0, -1.0, -p), (0.0, 1.0, -p),
            (p, 0.0, -1.0), (p, 0.0, 1.0), (-p, 0.0, -1.0), (-p, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
                *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(tris.len() * 4);
            for [a, b, c] in tris {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            tris = next;
        }
        let verts = verts.into_iter().map(|v| v * radius).collect();
        ObjectMesh::new(verts, tris).expect("icosphere is valid")
    }

    /// Surface of revolution about +z of a closed profile `(r, z)` listed counter-clockwise
    /// in the (r, z) half plane. Profile points with `r == 0` become poles.
    pub fn revolve(profile: &[(f64, f64)], segments: usize) -> Result<Self> {
        if profile.len() < 3 || segments < 3 {
            return Err(Error::Mesh("revolve needs >= 3 profile points and >= 3 segments".into()));
        }
        let mut verts = Vec::new();
        let mut rings: Vec<Vec<usize>> = Vec::new();
        for &(r, z) in profile {
            if r < 0.0 {
                return Err(Error::Mesh(format!("negative radius {r} in profile")));
            }
            if r == 0.0 {
                verts.push(Vec3::new(0.0, 0.0, z));
                rings.push(vec![verts.len() - 1; segments]);
            } else {
                let ring = (0..segments)
                    .map(|k| {
                        let a = TAU * k as f64 / segments as f64;
                        verts.push(Vec3::new(r * a.cos(), r * a.sin(), z));
                        verts.len() - 1
                    })
                    .collect();
                rings.push(ring);
            }
        }
        let mut tris = Vec::new();
        let n = profile.len();
        for i in 0..n {
            let (ra, rb) = (&rings[i], &rings[(i + 1) % n]);
            for k in 0..segments {
                let k1 = (k + 1) % segments;
                let (a0, a1, b0, b1) = (ra[k], ra[k1], rb[k], rb[k1]);
                if a0 != a1 {
                    tris.push([a0, a1, b1]);
                }
                if b0 != b1 {
                    tris.push([a0, b1, b0]);
                }
            }
        }
        tris.retain(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
        let mut m = ObjectMesh::new(verts, tris)?;
        if m.signed_volume() < 0.0 {
            for t in &mut m.triangles {
                t.swap(1, 2);
            }
            m.watertight = m.check_watertight().is_ok();
        }
        Ok(m)
    }

    /// Open-topped cup with a solid base: a non-convex, mug-like solid.
    pub fn cup(outer_radius: f64, height: f64, wall: f64, segments: usize) -> Self {
        let (r, h, w) = (outer_radius, height, wall);
        let profile = [(0.0, 0.0), (r, 0.0), (r, h), (r - w, h), (r - w, w), (0.0, w)];
        Self::revolve(&profile, segments).expect("cup profile is valid")
    }

    pub fn torus(major: f64, minor: f64, segments: usize, sides: usize) -> Self {
        let profile: Vec<(f64, f64)> = (0..sides)
            .map(|k| {
                let a = TAU * k as f64 / sides as f64;
                (major + minor * a.cos(), minor * a.sin())
            })
            .collect();
        Self::revolve(&profile, segments).expect("torus profile is valid")
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    /// Reads `v` and `f` records; everything else is skipped. Polygons are fan-triangulated.
    pub fn read_obj<R: BufRead>(r: R) -> Result<Self> {
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it
                        .take(3)
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse { line: line_no, message: format!("bad vertex: {e}") })?;
                    if c.len() != 3 {
                        return Err(Error::Parse { line: line_no, message: "vertex needs 3 coordinates".into() });
                    }
                    verts.push(Vec3::new(c[0], c[1], c[2]));
                }
                Some("f") => {
                    let idx = it
                        .map(|tok| {
                            let first = tok.split('/').next().unwrap_or("");
                            let k: i64 = first
                                .parse()
                                .map_err(|e| Error::Parse { line: line_no, message: format!("bad face index: {e}") })?;
                            let resolved = if k > 0 { k - 1 } else { verts.len() as i64 + k };
                            if resolved < 0 || resolved as usize >= verts.len() {
                                return Err(Error::Parse { line: line_no, message: format!("face index {k} out of range") });
                            }
                            Ok(resolved as usize)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if idx.len() < 3 {
                        return Err(Error::Parse { line: line_no, message: "face needs >= 3 vertices".into() });
                    }
                    for k in 1..idx.len() - 1 {
                        tris.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        ObjectMesh::new(verts, tris)
    }

    pub fn read_obj_file(path: &std::path::Path) -> Result<Self> {
        Self::read_obj(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_watertight() {
        let meshes = [
            ObjectMesh::cube(0.5),
            ObjectMesh::icosphere(0.04, 2),
            ObjectMesh::cup(0.04, 0.1, 0.008, 24),
            ObjectMesh::torus(0.05, 0.015, 24, 12),
            ObjectMesh::cuboid(Vec3::new(0.1, 0.01, 0.02)),
        ];
        for m in &meshes {
            m.check_watertight().unwrap();
            m.check_degenerate().unwrap();
            assert!(m.is_watertight());
        }
        assert!((ObjectMesh::cube(0.5).signed_volume() - 1.0).abs() < 1e-12);
        let cup = ObjectMesh::cup(0.04, 0.1, 0.008, 64);
        let exact = std::f64::consts::PI * (0.04f64.powi(2) * 0.1 - 0.032f64.powi(2) * 0.092);
        assert!((cup.signed_volume() - exact).abs() / exact < 0.01);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut m = ObjectMesh::cube(0.5);
        m.triangles.pop();
        assert!(m.check_watertight().is_err());
        let m = ObjectMesh::new(m.vertices.clone(), m.triangles.clone()).unwrap();
        assert!(!m.is_watertight());
    }

    #[test]
    fn inverted_mesh_is_rejected() {
        let mut m = ObjectMesh::cube(0.5);
        for t in &mut m.triangles {
            t.swap(0, 1);
        }
        assert!(m.check_watertight().is_err());
    }

    #[test]
    fn degenerate_triangle_detected() {
        let v = vec![Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0, Vec3::y()];
        let m = ObjectMesh::new(v, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        assert!(matches!(m.check_degenerate(), Err(Error::DegenerateTriangle(0))));
    }

    #[test]
    fn obj_round_trip_and_polygons() {
        let m = ObjectMesh::icosphere(1.0, 1);
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let back = ObjectMesh::read_obj(buf.as_slice()).unwrap();
        assert_eq!(back.triangles, m.triangles);
        assert!(back.is_watertight());

        let quad = "# comment\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2/2/1 3/3/1 4/4/1\n";
        let q = ObjectMesh::read_obj(quad.as_bytes()).unwrap();
        assert_eq!(q.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        let neg = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
        assert_eq!(ObjectMesh::read_obj(neg.as_bytes()).unwrap().triangles, vec![[0, 1, 2]]);
        assert!(matches!(ObjectMesh::read_obj("v 0 0\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ObjectMesh::read_obj("v 0 0 0\nf 1 2 3\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }
}
