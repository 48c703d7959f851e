//! Strain-triggered face separation and the topology rebuild that opens cracks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::math::Vec3;

use super::barrier::{min_distance, Collider};
use super::scripted::ScriptedBody;
use super::solver::{collider_for, SimState};
use super::tetmesh::{InteriorFace, TetMesh};

/// Current over rest length for the three vertex pairs of every interior face.
pub fn face_stretch_ratios(x: &[Vec3], mesh: &TetMesh) -> Result<Vec<(InteriorFace, [f64; 3])>> {
    mesh.interior
        .iter()
        .map(|f| {
            let mut r = [0.0; 3];
            for k in 0..3 {
                let (a, b) = (f.verts[k], f.verts[(k + 1) % 3]);
                let rest = (mesh.rest[a] - mesh.rest[b]).norm();
                if rest == 0.0 {
                    return Err(Error::Mesh(format!("nodes {a} and {b} coincide at rest")));
                }
                r[k] = (x[a] - x[b]).norm() / rest;
            }
            Ok((*f, r))
        })
        .collect()
}

/// Interior faces, by tet pair, whose vertex pairs stretched past `threshold` and were
/// not separated before.
pub fn fracture_update(
    x: &[Vec3],
    mesh: &TetMesh,
    threshold: f64,
    separated: &BTreeSet<(usize, usize)>,
) -> Result<Vec<(usize, usize)>> {
    Ok(face_stretch_ratios(x, mesh)?
        .into_iter()
        .filter(|(f, r)| !separated.contains(&f.tets) && r.iter().any(|&s| s > threshold))
        .map(|(f, _)| f.tets)
        .collect())
}

/// Connected components of tets joined by unseparated interior faces; ids follow the
/// lowest tet index in each component.
pub fn tet_components(mesh: &TetMesh, separated: &BTreeSet<(usize, usize)>) -> (Vec<usize>, usize) {
    let n = mesh.tets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for f in &mesh.interior {
        if !separated.contains(&f.tets) {
            let (a, b) = (find(&mut parent, f.tets.0), find(&mut parent, f.tets.1));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut comp = vec![0; n];
    let mut count = 0;
    for t in 0..n {
        let r = find(&mut parent, t);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        comp[t] = label[r];
    }
    (comp, count)
}

/// Result of reopening the mesh along separated faces.
#[derive(Debug, Clone)]
pub struct Rebuilt {
    pub mesh: TetMesh,
    pub state: SimState,
    pub pieces: usize,
    /// Nodes created by the split, as `(new index, original index)`.
    pub duplicated: Vec<(usize, usize)>,
    /// Perturbation actually used.
    pub eps: f64,
}

fn face_normal(x: &[Vec3], f: &[usize; 3]) -> Vec3 {
    (x[f[1]] - x[f[0]]).cross(&(x[f[2]] - x[f[0]]))
}

fn split(mesh: &TetMesh, state: &SimState, comp: &[usize], pieces: usize, eps: f64) -> Result<(TetMesh, SimState, Vec<(usize, usize)>)> {
    let n = mesh.rest.len();
    // Components touching each node, in ascending order.
    let mut node_comps: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for &v in tet {
            if !node_comps[v].contains(&comp[t]) {
                node_comps[v].push(comp[t]);
            }
        }
    }
    node_comps.iter_mut().for_each(|c| c.sort_unstable());
    // Direction each component's copy of a node moves: summed normals of the cut faces
    // seen from the other side, i.e. pointing into that component.
    let mut push: std::collections::HashMap<(usize, usize), Vec3> = std::collections::HashMap::new();
    for f in &mesh.interior {
        let (ca, cb) = (comp[f.tets.0], comp[f.tets.1]);
        if ca == cb {
            continue;
        }
        // `verts` wind outward from the first tet, so the normal points into the second.
        let nrm = face_normal(&state.x, &f.verts);
        let nrm = if nrm.norm() > 0.0 { nrm.normalize() } else { nrm };
        for &v in &f.verts {
            *push.entry((v, cb)).or_insert_with(Vec3::zeros) += nrm;
            *push.entry((v, ca)).or_insert_with(Vec3::zeros) -= nrm;
        }
    }
    let mut centroid = vec![Vec3::zeros(); pieces];
    let mut count = vec![0usize; pieces];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for &v in tet {
            centroid[comp[t]] += state.x[v];
            count[comp[t]] += 1;
        }
    }
    for (c, k) in centroid.iter_mut().zip(&count) {
        *c /= (*k).max(1) as f64;
    }

    let mut rest = mesh.rest.clone();
    let mut x = state.x.clone();
    let mut v = state.v.clone();
    let mut index: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
    let mut duplicated = Vec::new();
    for node in 0..n {
        let comps = &node_comps[node];
        if comps.len() < 2 {
            continue;
        }
        for (k, &c) in comps.iter().enumerate() {
            let id = if k == 0 {
                node
            } else {
                rest.push(mesh.rest[node]);
                x.push(state.x[node]);
                v.push(state.v[node]);
                duplicated.push((rest.len() - 1, node));
                rest.len() - 1
            };
            index.insert((node, c), id);
            let dir = push.get(&(node, c)).copied().unwrap_or_else(Vec3::zeros);
            let dir = if dir.norm() > 1e-12 { dir.normalize() } else { (centroid[c] - state.x[node]).normalize() };
            x[id] = state.x[node] + dir * eps;
        }
    }
    let tets: Vec<[usize; 4]> = mesh
        .tets
        .iter()
        .enumerate()
        .map(|(t, tet)| tet.map(|node| index.get(&(node, comp[t])).copied().unwrap_or(node)))
        .collect();
    let new_mesh = TetMesh::new(rest, tets)?;
    let new_state = SimState { x, v, pieces, ..state.clone() };
    Ok((new_mesh, new_state, duplicated))
}

/// Duplicates nodes shared by different pieces and nudges each copy off the crack.
///
/// Tries `eps`, then `2 eps`; fails if the result still has touching surfaces.
pub fn rebuild_topology(mesh: &TetMesh, state: &SimState, bodies: &[ScriptedBody], eps: f64) -> Result<Rebuilt> {
    let (comp, pieces) = tet_components(mesh, &state.separated);
    if mesh.interior.iter().all(|f| comp[f.tets.0] == comp[f.tets.1]) {
        return Ok(Rebuilt { mesh: mesh.clone(), state: SimState { pieces, ..state.clone() }, pieces, duplicated: Vec::new(), eps: 0.0 });
    }
    let mut last = String::new();
    for e in [eps, 2.0 * eps] {
        let (m, s, duplicated) = split(mesh, state, &comp, pieces, e)?;
        let collider: Collider = collider_for(&m, bodies);
        let mut pos = s.x.clone();
        for b in bodies {
            pos.extend(b.world_vertices(s.t)?);
        }
        let d = min_distance(&pos, &collider);
        if d > 0.0 {
            return Ok(Rebuilt { mesh: m, state: s, pieces, duplicated, eps: e });
        }
        last = format!("minimum distance {d} after perturbing by {e}");
    }
    Err(Error::InvariantViolation(format!("fracture split is not intersection-free: {last}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rot_axis;

    /// Two tets sharing face (0, 1, 2), apexes on either side.
    pub(crate) fn two_tets() -> TetMesh {
        let rest = vec![
            Vec3::zeros(),
            Vec3::new(0.01, 0.0, 0.0),
            Vec3::new(0.0, 0.01, 0.0),
            Vec3::new(0.003, 0.003, 0.01),
            Vec3::new(0.003, 0.003, -0.01),
        ];
        TetMesh::new(rest, vec![[0, 1, 2, 3], [0, 2, 1, 4]]).unwrap()
    }

    #[test]
    fn rigid_motion_separates_nothing() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(0.02), [2, 2, 2]).unwrap();
        let r = rot_axis(&Vec3::new(0.3, -1.0, 0.2), 2.0);
        let x: Vec<Vec3> = m.rest.iter().map(|p| r * p + Vec3::new(1.0, 2.0, 3.0)).collect();
        assert!(fracture_update(&x, &m, 1.1, &BTreeSet::new()).unwrap().is_empty());
        for (_, ratios) in face_stretch_ratios(&x, &m).unwrap() {
            assert!(ratios.iter().all(|s| (s - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn stretched_shared_edge_separates() {
        let m = two_tets();
        let mut x = m.rest.clone();
        x[1].x = 0.012;
        assert_eq!(fracture_update(&x, &m, 1.1, &BTreeSet::new()).unwrap(), vec![(0, 1)]);
        let expanded: Vec<Vec3> = m.rest.iter().map(|p| p * 1.05).collect();
        assert!(fracture_update(&expanded, &m, 1.1, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn split_two_tets() {
        let m = two_tets();
        let mut s = SimState::at_rest(&m);
        s.separated.insert((0, 1));
        let eps = 1e-6 * m.diagonal();
        let out = rebuild_topology(&m, &s, &[], eps).unwrap();
        assert_eq!(out.pieces, 2);
        assert_eq!(out.duplicated.len(), 3);
        assert_eq!(out.mesh.node_count(), 8);
        assert!(out.mesh.interior.is_empty());
        assert_eq!(out.mesh.surface.len(), 8);
        let gap = out
            .duplicated
            .iter()
            .map(|&(new, old)| (out.state.x[new] - out.state.x[old]).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(gap >= 2.0 * eps * (1.0 - 1e-9), "{gap}");
        // The apex of each piece moves away from the other piece.
        assert!(out.state.x[0].z > 0.0);
    }

    #[test]
    fn no_separation_keeps_mesh() {
        let m = two_tets();
        let out = rebuild_topology(&m, &SimState::at_rest(&m), &[], 1e-9).unwrap();
        assert_eq!(out.pieces, 1);
        assert_eq!(out.mesh, m);
    }

    /// Boerdijk-Coxeter helix: tet `i` is nodes `i..i+4`, consecutive tets share a face.
    pub(crate) fn helix(tets: usize) -> TetMesh {
        let r = 3.0 * 3f64.sqrt() / 10.0;
        let theta = (-2.0f64 / 3.0).acos();
        let h = 1.0 / 10f64.sqrt();
        let rest: Vec<Vec3> = (0..tets + 3)
            .map(|k| {
                let k = k as f64;
                Vec3::new(r * (k * theta).cos(), r * (k * theta).sin(), k * h) * 0.01
            })
            .collect();
        let mut t: Vec<[usize; 4]> = (0..tets).map(|i| [i, i + 1, i + 2, i + 3]).collect();
        for tet in &mut t {
            if super::super::tetmesh::tet_volume(&rest, tet) < 0.0 {
                tet.swap(2, 3);
            }
        }
        TetMesh::new(rest, t).unwrap()
    }

    #[test]
    fn cut_bar_makes_two_pieces() {
        let m = helix(10);
        assert_eq!(m.interior.len(), 9);
        let mut s = SimState::at_rest(&m);
        s.separated.insert((4, 5));
        let (comp, n) = tet_components(&m, &s.separated);
        assert_eq!(n, 2);
        assert_eq!(comp, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let out = rebuild_topology(&m, &s, &[], 1e-6 * m.diagonal()).unwrap();
        assert_eq!(out.pieces, 2);
        assert_eq!(out.duplicated.len(), 3);
    }
}
