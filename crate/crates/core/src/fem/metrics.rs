//! Per-step observables: elastic energy, piece count and tool contact pressure.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::math::Vec3;

use super::barrier::{active_pairs, barrier_d1};
use super::elastic::elastic_energy;
use super::material::MaterialParams;
use super::scripted::ScriptedBody;
use super::solver::{collider_for, SimState};
use super::tetmesh::TetMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub t: f64,
    pub energy_j: f64,
    pub pieces: usize,
    pub pressure_pa: f64,
}

/// Metrics of an accepted state.
///
/// Pressure counts only object-tool pairs: the summed barrier force magnitudes
/// `kappa |b'(d)|` divided by the area of the object surface triangles taking part,
/// either as the pair's triangle or as a triangle around the pair's object node.
pub fn step_metrics(
    state: &SimState,
    mesh: &TetMesh,
    material: &MaterialParams,
    bodies: &[ScriptedBody],
    dhat: f64,
) -> Result<StepMetrics> {
    let collider = collider_for(mesh, bodies);
    let mut pos = state.x.clone();
    for b in bodies {
        pos.extend(b.world_vertices(state.t)?);
    }
    let mut force = 0.0;
    let mut tris: BTreeSet<usize> = BTreeSet::new();
    let mut nodes: BTreeSet<usize> = BTreeSet::new();
    for pair in active_pairs(&pos, &collider, dhat)? {
        let point_on_object = pair.point < mesh.rest.len();
        let tri_on_object = collider.tri_owner[pair.tri].is_none();
        if point_on_object == tri_on_object {
            continue;
        }
        force += state.kappa * barrier_d1(pair.distance, dhat).abs();
        if tri_on_object {
            tris.insert(pair.tri);
        } else {
            nodes.insert(pair.point);
        }
    }
    for (i, f) in mesh.surface.iter().enumerate() {
        if f.iter().any(|v| nodes.contains(v)) {
            tris.insert(i);
        }
    }
    let area: f64 = tris
        .iter()
        .map(|&i| {
            let f = mesh.surface[i];
            0.5 * (pos[f[1]] - pos[f[0]]).cross(&(pos[f[2]] - pos[f[0]])).norm()
        })
        .sum();
    Ok(StepMetrics {
        t: state.t,
        // Rounding can leave a rest state a few ulps below zero.
        energy_j: elastic_energy(&state.x, mesh, material).max(0.0),
        pieces: state.pieces,
        pressure_pa: if area > 0.0 { force / area } else { 0.0 },
    })
}

pub fn write_metrics_csv<W: Write>(mut w: W, rows: &[StepMetrics]) -> Result<()> {
    writeln!(w, "t,energy_J,pieces,pressure_Pa")?;
    for m in rows {
        writeln!(w, "{},{},{},{}", m.t, m.energy_j, m.pieces, m.pressure_pa)?;
    }
    Ok(())
}

/// Surface of every piece as a separate OBJ document, in piece order.
pub fn piece_surfaces(mesh: &TetMesh, x: &[Vec3], separated: &BTreeSet<(usize, usize)>) -> Vec<String> {
    let (comp, pieces) = super::fracture::tet_components(mesh, separated);
    let mut node_piece = vec![usize::MAX; mesh.rest.len()];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for &v in tet {
            node_piece[v] = comp[t];
        }
    }
    (0..pieces)
        .map(|p| {
            let mut local = vec![usize::MAX; mesh.rest.len()];
            let mut out = String::new();
            let mut next = 0;
            let mut faces = String::new();
            for f in mesh.surface.iter().filter(|f| node_piece[f[0]] == p) {
                let mut ids = [0; 3];
                for (k, &v) in f.iter().enumerate() {
                    if local[v] == usize::MAX {
                        local[v] = next;
                        next += 1;
                        out.push_str(&format!("v {} {} {}\n", x[v].x, x[v].y, x[v].z));
                    }
                    ids[k] = local[v] + 1;
                }
                faces.push_str(&format!("f {} {} {}\n", ids[0], ids[1], ids[2]));
            }
            out + &faces
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grasp::ObjectMesh;
    use crate::math::Pose;

    #[test]
    fn rest_without_contact_is_zero() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(0.01), [1, 1, 1]).unwrap();
        let s = SimState::at_rest(&m);
        let r = step_metrics(&s, &m, &MaterialParams::carrot(), &[], 1e-5).unwrap();
        assert_eq!((r.energy_j, r.pieces, r.pressure_pa), (0.0, 1, 0.0));
    }

    #[test]
    fn pressure_is_force_over_area() {
        // One tet face lying flat at z = 0; a body vertex hovers over it.
        let m = TetMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(0.2, 0.2, -1.0)],
            vec![[0, 2, 1, 3]],
        )
        .unwrap();
        let probe = ObjectMesh::new(
            vec![Vec3::new(0.25, 0.25, 0.5), Vec3::new(5.0, 5.0, 5.0), Vec3::new(6.0, 5.0, 5.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let body = ScriptedBody::fixed(0, probe, Pose::identity());
        let mut s = SimState::at_rest(&m);
        s.kappa = 3.0;
        let dhat = 0.52;
        let r = step_metrics(&s, &m, &MaterialParams::carrot(), &[body], dhat).unwrap();
        let d: f64 = 0.5;
        let b1 = -2.0 * (d - dhat) * (d / dhat).ln() - (d - dhat).powi(2) / d;
        let oracle = 3.0 * b1.abs() / 0.5;
        assert!((r.pressure_pa - oracle).abs() < 1e-12 * oracle, "{} vs {oracle}", r.pressure_pa);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[StepMetrics { t: 0.05, energy_j: 1.5, pieces: 2, pressure_pa: 0.0 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,energy_J,pieces,pressure_Pa\n0.05,1.5,2,0\n");
    }

    #[test]
    fn pieces_export_separately() {
        let m = TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(0.01), [1, 1, 1]).unwrap();
        let docs = piece_surfaces(&m, &m.rest, &BTreeSet::new());
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].lines().filter(|l| l.starts_with("f ")).count(), 12);
    }
}
