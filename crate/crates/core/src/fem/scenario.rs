//! Built-in tool-use scenes: a plate pressing a carrot block, hammer strikes on a walnut
//! and a knife wedge cutting one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grasp::ObjectMesh;
use crate::math::{Pose, Vec3};
use nalgebra::UnitQuaternion;

use super::material::MaterialParams;
use super::scripted::ScriptedBody;
use super::solver::SimParams;
use super::tetmesh::TetMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimScenario {
    PlatePress,
    HammerFast,
    HammerSlow,
    Knife,
}

impl SimScenario {
    pub const ALL: [SimScenario; 4] =
        [SimScenario::PlatePress, SimScenario::HammerFast, SimScenario::HammerSlow, SimScenario::Knife];

    pub fn name(self) -> &'static str {
        match self {
            SimScenario::PlatePress => "plate-press",
            SimScenario::HammerFast => "hammer-fast",
            SimScenario::HammerSlow => "hammer-slow",
            SimScenario::Knife => "knife",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        SimScenario::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }

    /// Assembles the scene with the given parameters.
    pub fn build(self, params: &SimParams) -> Result<Scene> {
        match self {
            SimScenario::PlatePress => plate_press(params),
            SimScenario::HammerFast => hammer(params, HAMMER_FAST_TRAVEL),
            SimScenario::HammerSlow => hammer(params, HAMMER_SLOW_TRAVEL),
            SimScenario::Knife => knife(params),
        }
    }
}

/// Everything needed to start a simulation.
#[derive(Debug, Clone)]
pub struct Scene {
    pub mesh: TetMesh,
    pub material: MaterialParams,
    pub bodies: Vec<ScriptedBody>,
    pub params: SimParams,
    pub steps: usize,
}

pub const WALNUT_RADIUS: f64 = 0.015;
/// Hammer travel past first contact over the strike, m.
pub const HAMMER_FAST_TRAVEL: f64 = 0.012;
pub const HAMMER_SLOW_TRAVEL: f64 = 0.003;
const STRIKE_STEPS: usize = 20;

pub const WALNUT_SHELL: f64 = 0.003;

/// Hollow ball used as the walnut: 336 tets.
pub fn walnut_mesh() -> Result<TetMesh> {
    TetMesh::shell(Vec3::zeros(), WALNUT_RADIUS, WALNUT_RADIUS - WALNUT_SHELL, 4)
}

/// Static slab whose top face sits `gap` below `z`.
fn support(id: usize, z: f64, gap: f64) -> ScriptedBody {
    let half = Vec3::new(0.04, 0.04, 0.005);
    ScriptedBody::fixed(id, ObjectMesh::cuboid(half), Pose::translation(0.0, 0.0, z - gap - half.z))
}

/// Four static slabs tilted 45° that hold a ball of radius `r` at the origin from below,
/// each `gap` off the sphere.
fn cradle(first_id: usize, r: f64, gap: f64) -> Vec<ScriptedBody> {
    let half = Vec3::new(0.012, 0.012, 0.003);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Vec3::new(s, 0.0, -s), Vec3::new(-s, 0.0, -s), Vec3::new(0.0, s, -s), Vec3::new(0.0, -s, -s)]
        .iter()
        .enumerate()
        .map(|(k, dir)| {
            let rot = UnitQuaternion::rotation_between(&Vec3::z(), &(-dir)).expect("not antiparallel");
            let centre = dir * (r + gap + half.z);
            ScriptedBody::fixed(first_id + k, ObjectMesh::cuboid(half), Pose::from_parts(centre.into(), rot))
        })
        .collect()
}

/// Tool moving straight down so its lowest point goes from `z0` to `z1` over `duration`.
fn plunge(id: usize, mesh: ObjectMesh, z0: f64, z1: f64, duration: f64) -> Result<ScriptedBody> {
    let low = mesh.vertices.iter().map(|v| v.z).fold(f64::INFINITY, f64::min);
    ScriptedBody::new(
        id,
        mesh,
        vec![(0.0, Pose::translation(0.0, 0.0, z0 - low)), (duration, Pose::translation(0.0, 0.0, z1 - low))],
    )
}

fn plate_press(params: &SimParams) -> Result<Scene> {
    let (hx, hz) = (0.015, 0.01);
    let mesh = TetMesh::grid_box(Vec3::new(-hx, -hx, 0.0), Vec3::new(hx, hx, 2.0 * hz), [3, 3, 2])?;
    let dhat = params.dhat(&mesh);
    let steps = 100;
    let duration = steps as f64 * params.dt_s;
    let top = 2.0 * hz;
    let plate = ObjectMesh::cuboid(Vec3::new(0.025, 0.025, 0.002));
    Ok(Scene {
        bodies: vec![support(0, 0.0, 0.5 * dhat), plunge(1, plate, top + 0.001, top - 0.003, duration)?],
        mesh,
        material: MaterialParams::carrot(),
        params: params.clone(),
        steps,
    })
}

/// The moving tool followed by the cradle.
fn walnut_tools(tool: ScriptedBody, dhat: f64) -> Vec<ScriptedBody> {
    let mut bodies = vec![tool];
    bodies.extend(cradle(1, WALNUT_RADIUS, 0.5 * dhat));
    bodies
}

fn hammer(params: &SimParams, travel: f64) -> Result<Scene> {
    let mesh = walnut_mesh()?;
    let dhat = params.dhat(&mesh);
    let duration = STRIKE_STEPS as f64 * params.dt_s;
    let head = ObjectMesh::cuboid(Vec3::new(0.025, 0.025, 0.008));
    let start = WALNUT_RADIUS + 0.5 * dhat;
    Ok(Scene {
        bodies: walnut_tools(plunge(0, head, start, start - travel, duration)?, dhat),
        mesh,
        material: MaterialParams::walnut(),
        params: params.clone(),
        steps: STRIKE_STEPS,
    })
}

/// Triangular prism with its cutting edge along y at z = 0, split into `segments`
/// slices so the edge carries vertices at least every `2 half_length / segments`.
pub fn wedge(half_length: f64, half_thickness: f64, height: f64, segments: usize) -> ObjectMesh {
    let (w, t, h) = (half_length, half_thickness, height);
    let n = segments.max(1);
    let mut v = Vec::with_capacity(3 * (n + 1));
    for i in 0..=n {
        let y = -w + 2.0 * w * i as f64 / n as f64;
        v.extend([Vec3::new(0.0, y, 0.0), Vec3::new(-t, y, h), Vec3::new(t, y, h)]);
    }
    // Slice i holds the edge point e, the left top corner a and the right top corner b.
    let (e, a, b) = (|i: usize| 3 * i, |i: usize| 3 * i + 1, |i: usize| 3 * i + 2);
    let mut tris = Vec::new();
    for i in 0..n {
        let j = i + 1;
        tris.extend([
            [e(i), a(i), a(j)],
            [e(i), a(j), e(j)],
            [e(i), e(j), b(j)],
            [e(i), b(j), b(i)],
            [a(i), b(i), b(j)],
            [a(i), b(j), a(j)],
        ]);
    }
    tris.push([e(0), b(0), a(0)]);
    tris.push([e(n), a(n), b(n)]);
    let probe = ObjectMesh::new(v.clone(), tris.clone()).expect("wedge indices are valid");
    if probe.signed_volume() < 0.0 {
        tris.iter_mut().for_each(|t| t.swap(1, 2));
    }
    ObjectMesh::new(v, tris).expect("wedge indices are valid")
}

fn knife(params: &SimParams) -> Result<Scene> {
    let mesh = walnut_mesh()?;
    let dhat = params.dhat(&mesh);
    let duration = STRIKE_STEPS as f64 * params.dt_s;
    let start = WALNUT_RADIUS + 0.5 * dhat;
    Ok(Scene {
        bodies: walnut_tools(plunge(0, wedge(0.025, 0.001, 0.012, 50), start, start - HAMMER_FAST_TRAVEL, duration)?, dhat),
        mesh,
        material: MaterialParams::walnut(),
        params: params.clone(),
        steps: STRIKE_STEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in SimScenario::ALL {
            assert_eq!(SimScenario::from_name(s.name()).unwrap(), s);
        }
        assert!(SimScenario::from_name("saw").is_err());
    }

    #[test]
    fn wedge_is_closed() {
        let w = wedge(0.02, 0.002, 0.01, 7);
        assert!(w.is_watertight());
        assert!((w.signed_volume() - 0.04 * 0.002 * 0.01).abs() < 1e-15);
    }

    #[test]
    fn scenes_start_apart() {
        for s in SimScenario::ALL {
            let scene = s.build(&SimParams::default()).unwrap();
            assert!(scene.mesh.tets.len() <= 500);
            let collider = super::super::solver::collider_for(&scene.mesh, &scene.bodies);
            let mut pos = scene.mesh.rest.clone();
            for b in &scene.bodies {
                pos.extend(b.world_vertices(0.0).unwrap());
            }
            assert!(super::super::barrier::min_distance(&pos, &collider) > 0.0, "{}", s.name());
        }
    }
}
