//! Tetrahedral meshes: topology, generators and the nodes/elements text format.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::math::Vec3;

/// Interior face shared by two tets; `verts` follow the first tet's outward winding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorFace {
    pub tets: (usize, usize),
    pub verts: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    pub rest: Vec<Vec3>,
    pub tets: Vec<[usize; 4]>,
    /// Boundary triangles, counter-clockwise seen from outside.
    pub surface: Vec<[usize; 3]>,
    pub interior: Vec<InteriorFace>,
    /// Inverse rest edge matrices.
    pub dm_inv: Vec<Matrix3<f64>>,
    pub rest_volume: Vec<f64>,
}

/// Outward-wound faces of a positively oriented tet, each paired with the opposite vertex.
pub(crate) fn tet_faces(t: &[usize; 4]) -> [[usize; 3]; 4] {
    let [a, b, c, d] = *t;
    [[a, c, b], [a, b, d], [a, d, c], [b, c, d]]
}

pub(crate) fn edge_matrix(x: &[Vec3], t: &[usize; 4]) -> Matrix3<f64> {
    let o = x[t[0]];
    Matrix3::from_columns(&[x[t[1]] - o, x[t[2]] - o, x[t[3]] - o])
}

pub fn tet_volume(x: &[Vec3], t: &[usize; 4]) -> f64 {
    edge_matrix(x, t).determinant() / 6.0
}

fn sorted3(f: [usize; 3]) -> [usize; 3] {
    let mut s = f;
    s.sort_unstable();
    s
}

impl TetMesh {
    /// Builds topology from rest positions and positively oriented tets.
    pub fn new(rest: Vec<Vec3>, tets: Vec<[usize; 4]>) -> Result<Self> {
        if tets.is_empty() {
            return Err(Error::Mesh("tet mesh has no elements".into()));
        }
        if rest.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Mesh("non-finite node position".into()));
        }
        let mut dm_inv = Vec::with_capacity(tets.len());
        let mut rest_volume = Vec::with_capacity(tets.len());
        for (i, t) in tets.iter().enumerate() {
            if t.iter().any(|&v| v >= rest.len()) {
                return Err(Error::Mesh(format!("tet {i} indexes past {} nodes", rest.len())));
            }
            let dm = edge_matrix(&rest, t);
            let vol = dm.determinant() / 6.0;
            if !(vol > 0.0) {
                return Err(Error::Mesh(format!("tet {i} has non-positive rest volume {vol}")));
            }
            dm_inv.push(dm.try_inverse().ok_or_else(|| Error::Mesh(format!("tet {i} is singular")))?);
            rest_volume.push(vol);
        }
        let mut faces: HashMap<[usize; 3], Vec<(usize, [usize; 3])>> = HashMap::new();
        for (i, t) in tets.iter().enumerate() {
            for f in tet_faces(t) {
                faces.entry(sorted3(f)).or_default().push((i, f));
            }
        }
        let mut surface = Vec::new();
        let mut interior = Vec::new();
        for (key, inc) in faces {
            match inc.as_slice() {
                [(_, f)] => surface.push(*f),
                [(t0, f0), (t1, _)] => {
                    let (a, b) = if t0 < t1 { (*t0, *t1) } else { (*t1, *t0) };
                    let verts = if a == *t0 { *f0 } else { inc[1].1 };
                    interior.push(InteriorFace { tets: (a, b), verts });
                }
                _ => return Err(Error::Mesh(format!("face {key:?} is shared by {} tets", inc.len()))),
            }
        }
        surface.sort_unstable_by_key(|f| sorted3(*f));
        interior.sort_unstable_by_key(|f| f.tets);
        Ok(TetMesh { rest, tets, surface, interior, dm_inv, rest_volume })
    }

    pub fn node_count(&self) -> usize {
        self.rest.len()
    }

    /// Bounding-box diagonal of the rest shape.
    pub fn diagonal(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.rest {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// Nodes that lie on the boundary.
    pub fn surface_nodes(&self) -> Vec<usize> {
        let mut on = vec![false; self.rest.len()];
        for f in &self.surface {
            for &v in f {
                on[v] = true;
            }
        }
        (0..self.rest.len()).filter(|&i| on[i]).collect()
    }

    /// Axis-aligned block of `n[0] × n[1] × n[2]` cubes, six tets each.
    pub fn grid_box(min: Vec3, max: Vec3, n: [usize; 3]) -> Result<Self> {
        if n.contains(&0) || (0..3).any(|k| !(max[k] > min[k])) {
            return Err(Error::InvalidArgument(format!("bad grid box {min:?}..{max:?} x {n:?}")));
        }
        let node = |i: usize, j: usize, k: usize| i + (n[0] + 1) * (j + (n[1] + 1) * k);
        let mut rest = Vec::new();
        for k in 0..=n[2] {
            for j in 0..=n[1] {
                for i in 0..=n[0] {
                    let s = Vec3::new(i as f64 / n[0] as f64, j as f64 / n[1] as f64, k as f64 / n[2] as f64);
                    rest.push(min + (max - min).component_mul(&s));
                }
            }
        }
        let mut tets = Vec::new();
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let corner = |bits: usize| node(i + (bits & 1), j + ((bits >> 1) & 1), k + ((bits >> 2) & 1));
                    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                        let b1 = 1 << perm[0];
                        let b2 = b1 | (1 << perm[1]);
                        tets.push([corner(0), corner(b1), corner(b2), corner(7)]);
                    }
                }
            }
        }
        orient(&rest, &mut tets);
        TetMesh::new(rest, tets)
    }

    /// Ball of the given radius: an `n³` cube grid mapped smoothly onto the sphere.
    pub fn ball(center: Vec3, radius: f64, n: usize) -> Result<Self> {
        let cube = TetMesh::grid_box(Vec3::repeat(-1.0), Vec3::repeat(1.0), [n, n, n])?;
        let rest: Vec<Vec3> = cube.rest.iter().map(|p| center + cube_to_sphere(p) * radius).collect();
        TetMesh::new(rest, cube.tets)
    }

    /// Hollow ball: the outer layer of an `n³` cube grid, mapped onto the shell between
    /// `inner_radius` and `outer_radius`. Needs `n >= 3`.
    pub fn shell(center: Vec3, outer_radius: f64, inner_radius: f64, n: usize) -> Result<Self> {
        if n < 3 || !(0.0 < inner_radius && inner_radius < outer_radius) {
            return Err(Error::InvalidArgument(format!(
                "bad shell: n = {n}, radii {inner_radius}..{outer_radius}"
            )));
        }
        let cube = TetMesh::grid_box(Vec3::repeat(-1.0), Vec3::repeat(1.0), [n, n, n])?;
        let on_rim = |c: usize| {
            let (i, j, k) = (c % n, (c / n) % n, c / (n * n));
            [i, j, k].iter().any(|&q| q == 0 || q == n - 1)
        };
        let kept: Vec<[usize; 4]> =
            cube.tets.iter().enumerate().filter(|(t, _)| on_rim(t / 6)).map(|(_, t)| *t).collect();
        let s_in = 1.0 - 2.0 / n as f64;
        let mut index = vec![usize::MAX; cube.rest.len()];
        let mut rest = Vec::new();
        let mut tets = Vec::with_capacity(kept.len());
        for t in kept {
            tets.push(t.map(|v| {
                if index[v] == usize::MAX {
                    index[v] = rest.len();
                    let p = cube.rest[v];
                    let s = p.amax();
                    let dir = cube_to_sphere(&(p / s));
                    let r = inner_radius + (s - s_in) / (1.0 - s_in) * (outer_radius - inner_radius);
                    rest.push(center + dir * r);
                }
                index[v]
            }));
        }
        TetMesh::new(rest, tets)
    }

    pub fn write_nodes<W: Write>(&self, w: W) -> Result<()> {
        write_nodes(w, &self.rest)
    }

    pub fn write_elements<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.tets.len())?;
        for (i, t) in self.tets.iter().enumerate() {
            writeln!(w, "{i} {} {} {} {}", t[0], t[1], t[2], t[3])?;
        }
        Ok(())
    }

    pub fn read<R1: BufRead, R2: BufRead>(nodes: R1, elements: R2) -> Result<Self> {
        let rest = parse_records::<_, 3, f64>(nodes)?.into_iter().map(Vec3::from).collect::<Vec<_>>();
        let tets = parse_records::<_, 4, usize>(elements)?;
        if let Some((i, _)) = tets.iter().enumerate().find(|(_, t)| t.iter().any(|&v| v >= rest.len())) {
            return Err(Error::Mesh(format!("element {i} references a node id >= {}", rest.len())));
        }
        TetMesh::new(rest, tets)
    }

    pub fn read_files(nodes: &std::path::Path, elements: &std::path::Path) -> Result<Self> {
        let open = |p: &std::path::Path| std::fs::File::open(p).map(std::io::BufReader::new);
        TetMesh::read(open(nodes)?, open(elements)?)
    }
}

pub fn write_nodes<W: Write>(mut w: W, nodes: &[Vec3]) -> Result<()> {
    writeln!(w, "{}", nodes.len())?;
    for (i, p) in nodes.iter().enumerate() {
        writeln!(w, "{i} {} {} {}", p.x, p.y, p.z)?;
    }
    Ok(())
}

/// Maps the cube `[-1, 1]³` onto the unit ball, boundary to sphere.
fn cube_to_sphere(p: &Vec3) -> Vec3 {
    let (x2, y2, z2) = (p.x * p.x, p.y * p.y, p.z * p.z);
    Vec3::new(
        p.x * (1.0 - y2 / 2.0 - z2 / 2.0 + y2 * z2 / 3.0).sqrt(),
        p.y * (1.0 - z2 / 2.0 - x2 / 2.0 + z2 * x2 / 3.0).sqrt(),
        p.z * (1.0 - x2 / 2.0 - y2 / 2.0 + x2 * y2 / 3.0).sqrt(),
    )
}

/// Flips tets with negative volume so every element is positively oriented.
fn orient(x: &[Vec3], tets: &mut [[usize; 4]]) {
    for t in tets {
        if tet_volume(x, t) < 0.0 {
            t.swap(2, 3);
        }
    }
}

/// Reads a `count` header then `id v...` lines; ids are 0-based and may come in any order.
fn parse_records<R: BufRead, const N: usize, T: std::str::FromStr + Copy + Default>(r: R) -> Result<Vec<[T; N]>>
where
    T::Err: std::fmt::Display,
{
    let mut count: Option<usize> = None;
    let mut out: Vec<Option<[T; N]>> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        let perr = |message: String| Error::Parse { line: line_no, message };
        match count {
            None => {
                let c = toks[0].parse::<usize>().map_err(|e| perr(format!("bad count header: {e}")))?;
                count = Some(c);
                out = vec![None; c];
            }
            Some(c) => {
                if toks.len() != N + 1 {
                    return Err(perr(format!("expected id and {N} values, got {} fields", toks.len())));
                }
                let id = toks[0].parse::<usize>().map_err(|e| perr(format!("bad id: {e}")))?;
                if id >= c {
                    return Err(perr(format!("id {id} out of range for count {c}")));
                }
                if out[id].is_some() {
                    return Err(perr(format!("duplicate id {id}")));
                }
                let mut rec = [T::default(); N];
                for (k, tok) in toks[1..].iter().enumerate() {
                    rec[k] = tok.parse::<T>().map_err(|e| perr(format!("bad value '{tok}': {e}")))?;
                }
                out[id] = Some(rec);
            }
        }
    }
    let c = count.ok_or_else(|| Error::Parse { line: 0, message: "missing count header".into() })?;
    out.into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::Parse { line: 0, message: format!("record {i} of {c} missing") }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface_volume(m: &TetMesh) -> f64 {
        m.surface
            .iter()
            .map(|f| m.rest[f[0]].dot(&m.rest[f[1]].cross(&m.rest[f[2]])) / 6.0)
            .sum()
    }

    #[test]
    fn grid_box_topology() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::new(2.0, 1.0, 1.0), [2, 1, 1]).unwrap();
        assert_eq!(m.tets.len(), 12);
        assert_eq!(m.node_count(), 12);
        let vol: f64 = m.rest_volume.iter().sum();
        assert!((vol - 2.0).abs() < 1e-12);
        assert!((surface_volume(&m) - 2.0).abs() < 1e-12);
        // Euler: each tet has 4 faces = 2 * interior + surface.
        assert_eq!(4 * m.tets.len(), 2 * m.interior.len() + m.surface.len());
        assert_eq!(m.surface.len(), 2 * (2 * 2 + 2 * 2 + 2));
    }

    #[test]
    fn ball_is_valid() {
        let m = TetMesh::ball(Vec3::zeros(), 0.015, 4).unwrap();
        assert_eq!(m.tets.len(), 384);
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 0.015f64.powi(3);
        let vol: f64 = m.rest_volume.iter().sum();
        assert!((vol - exact).abs() / exact < 0.1, "{vol} vs {exact}");
        assert!((surface_volume(&m) - vol).abs() < 1e-15);
        for p in m.surface_nodes() {
            assert!((m.rest[p].norm() - 0.015).abs() < 1e-12);
        }
    }

    #[test]
    fn shell_is_hollow() {
        let m = TetMesh::shell(Vec3::zeros(), 0.015, 0.012, 4).unwrap();
        assert_eq!(m.tets.len(), 6 * (64 - 8));
        let exact = 4.0 / 3.0 * std::f64::consts::PI * (0.015f64.powi(3) - 0.012f64.powi(3));
        let vol: f64 = m.rest_volume.iter().sum();
        assert!((vol - exact).abs() / exact < 0.15, "{vol} vs {exact}");
        // Outer minus inner boundary volume equals the solid volume.
        assert!((surface_volume(&m) - vol).abs() < 1e-15);
        for p in m.surface_nodes() {
            let r = m.rest[p].norm();
            assert!((r - 0.015).abs() < 1e-12 || (r - 0.012).abs() < 1e-12, "{r}");
        }
        assert!(TetMesh::shell(Vec3::zeros(), 0.015, 0.012, 2).is_err());
    }

    #[test]
    fn interior_faces_match_tets() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(1.0), [1, 1, 1]).unwrap();
        for f in &m.interior {
            let (a, b) = f.tets;
            for v in f.verts {
                assert!(m.tets[a].contains(&v) && m.tets[b].contains(&v));
            }
        }
    }

    #[test]
    fn inverted_tet_rejected() {
        let rest = vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
        assert!(TetMesh::new(rest.clone(), vec![[0, 1, 2, 3]]).is_ok());
        assert!(TetMesh::new(rest, vec![[0, 2, 1, 3]]).is_err());
    }

    #[test]
    fn io_round_trip() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(0.01), [2, 2, 1]).unwrap();
        let (mut n, mut e) = (Vec::new(), Vec::new());
        m.write_nodes(&mut n).unwrap();
        m.write_elements(&mut e).unwrap();
        let back = TetMesh::read(n.as_slice(), e.as_slice()).unwrap();
        assert_eq!(back.tets, m.tets);
        assert_eq!(back.rest, m.rest);
    }

    #[test]
    fn io_errors_carry_lines() {
        let nodes = "2\n0 0 0 0\n1 1 0\n";
        assert!(matches!(
            parse_records::<_, 3, f64>(nodes.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let nodes = "4\n0 0 0 0\n1 1 0 0\n2 0 1 0\n3 0 0 1\n";
        let elems = "1\n0 0 1 2 7\n";
        assert!(TetMesh::read(nodes.as_bytes(), elems.as_bytes()).is_err());
        let shuffled = "4\n3 0 0 1\n1 1 0 0\n0 0 0 0\n2 0 1 0\n";
        let m = TetMesh::read(shuffled.as_bytes(), "1\n0 0 1 2 3\n".as_bytes()).unwrap();
        assert_eq!(m.rest[3], Vec3::z());
    }
}
