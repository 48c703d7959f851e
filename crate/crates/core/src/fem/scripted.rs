//! Rigid bodies whose motion is prescribed by a pose track.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grasp::ObjectMesh;
use crate::math::{pose_from_array, pose_to_array, Pose, Vec3};

/// Slack allowed when a query time sits just outside a track.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedBody {
    pub id: usize,
    /// Surface in the body frame; the mesh's own pose is ignored.
    pub mesh: ObjectMesh,
    /// Strictly increasing times. A single keyframe holds the body still forever.
    pub keyframes: Vec<(f64, Pose)>,
}

impl ScriptedBody {
    pub fn new(id: usize, mesh: ObjectMesh, keyframes: Vec<(f64, Pose)>) -> Result<Self> {
        if keyframes.is_empty() {
            return Err(Error::InvalidArgument(format!("body {id} has no keyframes")));
        }
        if keyframes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument(format!("body {id} keyframe times must increase")));
        }
        Ok(ScriptedBody { id, mesh, keyframes })
    }

    pub fn fixed(id: usize, mesh: ObjectMesh, pose: Pose) -> Self {
        ScriptedBody { id, mesh, keyframes: vec![(0.0, pose)] }
    }

    pub fn is_static(&self) -> bool {
        self.keyframes.len() == 1
    }

    /// Time span covered by the track, or `None` for a static body.
    pub fn horizon(&self) -> Option<(f64, f64)> {
        (!self.is_static()).then(|| (self.keyframes[0].0, self.keyframes.last().expect("non-empty").0))
    }

    /// Linear translation and spherical rotation interpolation between keyframes.
    pub fn pose_at(&self, t: f64) -> Result<Pose> {
        if self.is_static() {
            return Ok(self.keyframes[0].1);
        }
        let (t0, t1) = self.horizon().expect("moving body");
        if t < t0 - TIME_EPS || t > t1 + TIME_EPS {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside body {} track [{t0}, {t1}]",
                self.id
            )));
        }
        let k = self.keyframes.partition_point(|(kt, _)| *kt <= t);
        if k == 0 {
            return Ok(self.keyframes[0].1);
        }
        if k == self.keyframes.len() {
            return Ok(self.keyframes[k - 1].1);
        }
        let ((ta, a), (tb, b)) = (self.keyframes[k - 1], self.keyframes[k]);
        let s = (t - ta) / (tb - ta);
        let trans = a.translation.vector.lerp(&b.translation.vector, s);
        let rot = a.rotation.slerp(&b.rotation, s);
        Ok(Pose::from_parts(trans.into(), rot))
    }

    pub fn world_vertices(&self, t: f64) -> Result<Vec<Vec3>> {
        let pose = self.pose_at(t)?;
        Ok(self.mesh.vertices.iter().map(|v| pose.transform_point(&(*v).into()).coords).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct TrackRecord {
    t: f64,
    body_id: usize,
    pose: [f64; 7],
}

/// Pose tracks per body id from `{t, body_id, pose}` lines.
pub fn read_trajectories<R: BufRead>(r: R) -> Result<BTreeMap<usize, Vec<(f64, Pose)>>> {
    let mut out: BTreeMap<usize, Vec<(f64, Pose)>> = BTreeMap::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let perr = |message: String| Error::Parse { line: i + 1, message };
        let rec: TrackRecord = serde_json::from_str(&line).map_err(|e| perr(e.to_string()))?;
        let pose = pose_from_array(rec.pose).map_err(|e| perr(e.to_string()))?;
        let track = out.entry(rec.body_id).or_default();
        if let Some((last, _)) = track.last() {
            if !(rec.t > *last) {
                return Err(perr(format!("body {} time {} does not increase past {last}", rec.body_id, rec.t)));
            }
        }
        track.push((rec.t, pose));
    }
    Ok(out)
}

pub fn read_trajectories_file(path: &std::path::Path) -> Result<BTreeMap<usize, Vec<(f64, Pose)>>> {
    read_trajectories(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Writes tracks time-major (ties broken by body id).
pub fn write_trajectories<W: Write>(mut w: W, bodies: &[ScriptedBody]) -> Result<()> {
    let mut rows: Vec<(f64, usize, Pose)> =
        bodies.iter().flat_map(|b| b.keyframes.iter().map(move |(t, p)| (*t, b.id, *p))).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (t, body_id, pose) in rows {
        writeln!(w, "{}", serde_json::to_string(&TrackRecord { t, body_id, pose: pose_to_array(&pose) })?)?;
    }
    Ok(())
}
