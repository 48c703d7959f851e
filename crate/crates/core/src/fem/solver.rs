//! Implicit Euler time stepping: incremental potential, projected Newton and a
//! collision-aware backtracking line search.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

use super::barrier::{active_pairs, barrier, barrier_d1, max_safe_step, pair_barrier_hessian, Collider, ContactPair};
use super::elastic::{elastic_energy, elastic_gradient, tet_hessian};
use super::material::MaterialParams;
use super::scripted::ScriptedBody;
use super::tetmesh::TetMesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub dt_s: f64,
    /// Barrier activation distance as a fraction of the object's bounding-box diagonal.
    pub dhat_rel: f64,
    /// Split perturbation as a fraction of the bounding-box diagonal.
    pub eps_rel: f64,
    pub newton_tol_m_per_s: f64,
    pub max_newton_iters: usize,
    pub gravity_m_s2: [f64; 3],
    /// Fixed barrier stiffness; derived from the material and mesh when absent.
    pub kappa: Option<f64>,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt_s: 0.05,
            dhat_rel: 1e-3,
            eps_rel: 1e-6,
            newton_tol_m_per_s: 1e-2,
            max_newton_iters: 100,
            gravity_m_s2: [0.0, 0.0, -9.81],
            kappa: None,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_s > 0.0
            && self.dt_s.is_finite()
            && self.dhat_rel > 0.0
            && self.eps_rel > 0.0
            && self.eps_rel < self.dhat_rel
            && self.newton_tol_m_per_s > 0.0
            && self.max_newton_iters > 0
            && self.gravity_m_s2.iter().all(|g| g.is_finite())
            && self.kappa.is_none_or(|k| k > 0.0 && k.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid simulation parameters {self:?}")))
        }
    }

    pub fn dhat(&self, mesh: &TetMesh) -> f64 {
        self.dhat_rel * mesh.diagonal()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub x: Vec<Vec3>,
    pub v: Vec<Vec3>,
    pub t: f64,
    /// Separated interior faces, keyed by their tet pair; never cleared.
    pub separated: BTreeSet<(usize, usize)>,
    pub pieces: usize,
    /// Barrier stiffness carried between steps.
    pub kappa: f64,
}

impl SimState {
    pub fn at_rest(mesh: &TetMesh) -> Self {
        SimState {
            x: mesh.rest.clone(),
            v: vec![Vec3::zeros(); mesh.rest.len()],
            t: 0.0,
            separated: BTreeSet::new(),
            pieces: 1,
            kappa: 0.0,
        }
    }
}

pub fn lumped_mass(mesh: &TetMesh, material: &MaterialParams) -> Vec<f64> {
    let mut m = vec![0.0; mesh.rest.len()];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for &v in tet {
            m[v] += material.density_kg_m3 * mesh.rest_volume[t] / 4.0;
        }
    }
    m
}

/// Stiffness giving a barrier force comparable to compressing one surface element by `dhat`.
pub fn default_kappa(mesh: &TetMesh, material: &MaterialParams) -> f64 {
    let mut total = 0.0;
    for f in &mesh.surface {
        for k in 0..3 {
            total += (mesh.rest[f[k]] - mesh.rest[f[(k + 1) % 3]]).norm();
        }
    }
    material.youngs_modulus_pa * total / (3 * mesh.surface.len()) as f64
}

pub fn collider_for(mesh: &TetMesh, bodies: &[ScriptedBody]) -> Collider {
    let shapes: Vec<(usize, &[[usize; 3]])> =
        bodies.iter().map(|b| (b.mesh.vertices.len(), b.mesh.triangles.as_slice())).collect();
    Collider::new(&mesh.surface, mesh.rest.len(), &shapes)
}

/// Where a contact point's coordinates come from in the unknown vector.
#[derive(Clone, Copy)]
enum DofMap {
    Node(usize),
    /// Body vertex moving along `u` as its body's path parameter changes.
    Path(usize, Vec3),
    Fixed,
}

/// Objective minimized by one implicit step over `z = [node positions; path parameters]`.
///
/// Each moving scripted body contributes one path parameter `s` that slides its
/// vertices linearly from their start-of-step to end-of-step positions; a quadratic
/// penalty pulls `s` towards 1.
pub struct IncrementalPotential<'a> {
    pub mesh: &'a TetMesh,
    pub material: &'a MaterialParams,
    pub collider: Collider,
    pub mass: Vec<f64>,
    pub x_tilde: Vec<Vec3>,
    pub h: f64,
    pub dhat: f64,
    pub kappa: f64,
    pub penalty: f64,
    /// Start-of-step world vertices per body.
    body_start: Vec<Vec<Vec3>>,
    /// End minus start per body vertex; empty for static bodies.
    body_dir: Vec<Vec<Vec3>>,
    /// Path parameter slot per body.
    s_slot: Vec<Option<usize>>,
    pub path_fixed: bool,
}

impl<'a> IncrementalPotential<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mesh: &'a TetMesh,
        material: &'a MaterialParams,
        bodies: &[ScriptedBody],
        state: &SimState,
        t_end: f64,
        h: f64,
        gravity: Vec3,
        dhat: f64,
        kappa: f64,
    ) -> Result<Self> {
        let mass = lumped_mass(mesh, material);
        let x_tilde = state.x.iter().zip(&state.v).map(|(x, v)| x + v * h + gravity * (h * h)).collect();
        let mut body_start = Vec::new();
        let mut body_dir = Vec::new();
        let mut s_slot = Vec::new();
        let mut next = 0;
        for b in bodies {
            let start = b.world_vertices(state.t)?;
            let end = b.world_vertices(t_end)?;
            let dir: Vec<Vec3> = start.iter().zip(&end).map(|(a, e)| e - a).collect();
            if dir.iter().any(|d| d.norm() > 0.0) {
                s_slot.push(Some(next));
                next += 1;
                body_dir.push(dir);
            } else {
                s_slot.push(None);
                body_dir.push(Vec::new());
            }
            body_start.push(start);
        }
        let total_mass: f64 = mass.iter().sum();
        let umax = body_dir.iter().flatten().map(|u| u.norm()).fold(0.0, f64::max);
        Ok(IncrementalPotential {
            mesh,
            material,
            collider: collider_for(mesh, bodies),
            mass,
            x_tilde,
            h,
            dhat,
            kappa,
            penalty: 1e6 * total_mass * umax * umax + f64::MIN_POSITIVE,
            body_start,
            body_dir,
            s_slot,
            path_fixed: false,
        })
    }

    pub fn node_dofs(&self) -> usize {
        3 * self.mesh.rest.len()
    }

    pub fn path_count(&self) -> usize {
        self.s_slot.iter().flatten().count()
    }

    pub fn dofs(&self) -> usize {
        self.node_dofs() + self.path_count()
    }

    /// Start-of-step unknowns: current positions and every path parameter at 0.
    pub fn initial(&self, x: &[Vec3]) -> DVector<f64> {
        let mut z = DVector::zeros(self.dofs());
        for (i, p) in x.iter().enumerate() {
            z.fixed_rows_mut::<3>(3 * i).copy_from(p);
        }
        z
    }

    pub fn nodes(&self, z: &DVector<f64>) -> Vec<Vec3> {
        (0..self.mesh.rest.len()).map(|i| z.fixed_rows::<3>(3 * i).into_owned()).collect()
    }

    pub fn path(&self, z: &DVector<f64>, body: usize) -> f64 {
        self.s_slot[body].map_or(1.0, |k| z[self.node_dofs() + k])
    }

    /// Unified positions: nodes, then every body's vertices.
    pub fn positions(&self, z: &DVector<f64>) -> Vec<Vec3> {
        let mut pos = self.nodes(z);
        for (b, start) in self.body_start.iter().enumerate() {
            let s = self.path(z, b);
            if self.body_dir[b].is_empty() {
                pos.extend(start.iter().copied());
            } else {
                pos.extend(start.iter().zip(&self.body_dir[b]).map(|(p, u)| p + u * s));
            }
        }
        pos
    }

    /// Coordinate displacement of every unified point for a step `dz`.
    fn displacement(&self, dz: &DVector<f64>) -> Vec<Vec3> {
        let mut d = self.nodes(dz);
        for (b, start) in self.body_start.iter().enumerate() {
            match self.s_slot[b] {
                Some(k) => {
                    let ds = dz[self.node_dofs() + k];
                    d.extend(self.body_dir[b].iter().map(|u| u * ds));
                }
                None => d.extend(std::iter::repeat_n(Vec3::zeros(), start.len())),
            }
        }
        d
    }

    fn dof_map(&self, point: usize) -> DofMap {
        match self.collider.owner(point) {
            None => DofMap::Node(point),
            Some(b) => match self.s_slot[b] {
                Some(k) if !self.path_fixed => {
                    DofMap::Path(self.node_dofs() + k, self.body_dir[b][point - self.collider.body_offsets[b]])
                }
                _ => DofMap::Fixed,
            },
        }
    }

    pub fn contacts(&self, z: &DVector<f64>) -> Result<Vec<ContactPair>> {
        active_pairs(&self.positions(z), &self.collider, self.dhat)
    }

    fn penalty_energy(&self, z: &DVector<f64>) -> f64 {
        (0..self.path_count()).map(|k| 0.5 * self.penalty * (1.0 - z[self.node_dofs() + k]).powi(2)).sum()
    }

    /// Incremental potential; errors when any contact pair has closed.
    pub fn energy(&self, z: &DVector<f64>) -> Result<f64> {
        let x = self.nodes(z);
        let h2 = self.h * self.h;
        let inertia: f64 =
            x.iter().zip(&self.x_tilde).zip(&self.mass).map(|((x, xt), m)| 0.5 * m * (x - xt).norm_squared()).sum();
        let contact: f64 = self.contacts(z)?.iter().map(|p| barrier(p.distance, self.dhat)).sum();
        Ok(inertia + h2 * elastic_energy(&x, self.mesh, self.material) + h2 * self.kappa * contact + self.penalty_energy(z))
    }

    pub fn gradient(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.nodes(z);
        let h2 = self.h * self.h;
        let mut g = DVector::zeros(self.dofs());
        let eg = elastic_gradient(&x, self.mesh, self.material);
        for i in 0..x.len() {
            let gi = (x[i] - self.x_tilde[i]) * self.mass[i] + eg[i] * h2;
            g.fixed_rows_mut::<3>(3 * i).copy_from(&gi);
        }
        for pair in self.contacts(z)? {
            let scale = h2 * self.kappa * barrier_d1(pair.distance, self.dhat);
            for (k, q) in pair.indices(&self.collider).into_iter().enumerate() {
                match self.dof_map(q) {
                    DofMap::Node(i) => {
                        let mut r = g.fixed_rows_mut::<3>(3 * i);
                        r += pair.grad[k] * scale;
                    }
                    DofMap::Path(j, u) => g[j] += scale * pair.grad[k].dot(&u),
                    DofMap::Fixed => {}
                }
            }
        }
        for k in 0..self.path_count() {
            let j = self.node_dofs() + k;
            g[j] = if self.path_fixed { 0.0 } else { g[j] - self.penalty * (1.0 - z[j]) };
        }
        Ok(g)
    }

    /// Positive semidefinite Hessian: elastic and barrier terms projected per element
    /// and per contact pair.
    pub fn hessian(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        let x = self.nodes(z);
        let h2 = self.h * self.h;
        let n = self.dofs();
        let mut hm = DMatrix::zeros(n, n);
        for (i, m) in self.mass.iter().enumerate() {
            for k in 0..3 {
                hm[(3 * i + k, 3 * i + k)] += m;
            }
        }
        for (t, tet) in self.mesh.tets.iter().enumerate() {
            let he = tet_hessian(&x, self.mesh, self.material, t, true);
            for a in 0..4 {
                for b in 0..4 {
                    let block = he.fixed_view::<3, 3>(3 * a, 3 * b) * h2;
                    let mut dst = hm.fixed_view_mut::<3, 3>(3 * tet[a], 3 * tet[b]);
                    dst += block;
                }
            }
        }
        let pos = self.positions(z);
        for pair in self.contacts(z)? {
            let hp = pair_barrier_hessian(&pair, &pos, &self.collider, self.dhat) * (h2 * self.kappa);
            let maps: Vec<DofMap> = pair.indices(&self.collider).iter().map(|&q| self.dof_map(q)).collect();
            for a in 0..4 {
                for b in 0..4 {
                    let block: SMatrix<f64, 3, 3> = hp.fixed_view::<3, 3>(3 * a, 3 * b).into_owned();
                    match (maps[a], maps[b]) {
                        (DofMap::Node(i), DofMap::Node(j)) => {
                            let mut dst = hm.fixed_view_mut::<3, 3>(3 * i, 3 * j);
                            dst += block;
                        }
                        (DofMap::Node(i), DofMap::Path(j, u)) => {
                            let col = block * u;
                            let mut dst = hm.fixed_view_mut::<3, 1>(3 * i, j);
                            dst += col;
                        }
                        (DofMap::Path(i, u), DofMap::Node(j)) => {
                            let row = u.transpose() * block;
                            let mut dst = hm.fixed_view_mut::<1, 3>(i, 3 * j);
                            dst += row;
                        }
                        (DofMap::Path(i, u), DofMap::Path(j, v)) => hm[(i, j)] += (u.transpose() * block * v)[0],
                        _ => {}
                    }
                }
            }
        }
        for k in 0..self.path_count() {
            let j = self.node_dofs() + k;
            if self.path_fixed {
                hm.row_mut(j).fill(0.0);
                hm.column_mut(j).fill(0.0);
                hm[(j, j)] = 1.0;
            } else {
                hm[(j, j)] += self.penalty;
            }
        }
        Ok(hm)
    }
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepReport {
    pub newton_iterations: usize,
    /// Incremental potential before the first and after every accepted Newton update,
    /// per solve (penalty rounds and the final pinned solve each start a new list).
    pub potentials: Vec<Vec<f64>>,
    pub penalty_rounds: usize,
    pub min_distance: f64,
    pub kappa: f64,
}

fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = h.diagonal().amax().max(1e-300);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut m = h.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        if let Some(ch) = m.cholesky() {
            return Some(-ch.solve(g));
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 100.0 };
    }
    None
}

/// Projected Newton to tolerance; returns the potentials seen. `max_iters` bounds this
/// solve, `used` accumulates over the step.
fn newton(
    ip: &IncrementalPotential,
    z: &mut DVector<f64>,
    tol: f64,
    max_iters: usize,
    used: &mut usize,
    t: f64,
) -> Result<Vec<f64>> {
    let fail = |message: String| Error::StepFailure { t, message };
    // Path parameters converge on length, to the same precision they must settle to.
    let mut e = ip.energy(z).map_err(|e| fail(format!("infeasible start: {e}")))?;
    let mut trace = vec![e];
    let mut iters = 0;
    let nd = ip.node_dofs();
    let umax: Vec<f64> = (0..ip.path_count())
        .map(|k| {
            let b = ip.s_slot.iter().position(|s| *s == Some(k)).expect("slot exists");
            ip.body_dir[b].iter().map(|u| u.norm()).fold(0.0, f64::max)
        })
        .collect();
    loop {
        let g = ip.gradient(z)?;
        let h = ip.hessian(z)?;
        let p = solve_spd(&h, &g).ok_or_else(|| fail("Newton system is not positive definite".into()))?;
        let step_x = (0..nd).map(|i| p[i].abs()).fold(0.0, f64::max);
        let step_s = (0..ip.path_count()).map(|k| p[nd + k].abs() * umax[k]).fold(0.0, f64::max);
        if step_x / ip.h < tol && step_s < 1e-3 * ip.dhat {
            return Ok(trace);
        }
        if iters >= max_iters {
            return Err(fail(format!(
                "Newton did not converge in {max_iters} iterations (last step {:.3e} m/s)",
                step_x / ip.h
            )));
        }
        iters += 1;
        *used += 1;
        let pos = ip.positions(z);
        let disp = ip.displacement(&p);
        let mut alpha = max_safe_step(&pos, &disp, &ip.collider);
        let slope = g.dot(&p);
        loop {
            if alpha < 1e-16 {
                return Err(fail(format!("line search underflow at potential {e:.6e}")));
            }
            let trial = &*z + &p * alpha;
            if let Ok(et) = ip.energy(&trial) {
                if et <= e + 1e-4 * alpha * slope.min(0.0) {
                    *z = trial;
                    e = et;
                    break;
                }
            }
            alpha *= 0.5;
        }
        trace.push(e);
    }
}

/// Advances the object by one implicit Euler step of length `dt`.
pub fn simulate_step(
    state: &SimState,
    mesh: &TetMesh,
    material: &MaterialParams,
    bodies: &[ScriptedBody],
    params: &SimParams,
    dt: f64,
) -> Result<(SimState, StepReport)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be > 0")));
    }
    let t_end = state.t + dt;
    let dhat = params.dhat(mesh);
    let kappa = if state.kappa > 0.0 { state.kappa } else { params.kappa.unwrap_or_else(|| default_kappa(mesh, material)) };
    let gravity = Vec3::from(params.gravity_m_s2);
    let mut ip = IncrementalPotential::new(mesh, material, bodies, state, t_end, dt, gravity, dhat, kappa)?;
    let mut z = ip.initial(&state.x);
    let mut report = StepReport { kappa, ..Default::default() };
    let mut used = 0;
    let nd = ip.node_dofs();
    let settled = |ip: &IncrementalPotential, z: &DVector<f64>| {
        (0..ip.s_slot.len()).all(|b| {
            ip.body_dir[b].is_empty()
                || (1.0 - ip.path(z, b)) * ip.body_dir[b].iter().map(|u| u.norm()).fold(0.0, f64::max) <= 1e-3 * dhat
        })
    };
    const MAX_ROUNDS: usize = 16;
    if ip.path_count() > 0 {
        loop {
            report.potentials.push(newton(&ip, &mut z, params.newton_tol_m_per_s, params.max_newton_iters, &mut used, t_end)?);
            report.penalty_rounds += 1;
            if settled(&ip, &z) {
                break;
            }
            if report.penalty_rounds >= MAX_ROUNDS {
                return Err(Error::StepFailure {
                    t: t_end,
                    message: "scripted bodies could not reach their prescribed poses".into(),
                });
            }
            ip.penalty *= 100.0;
        }
        let mut snapped = z.clone();
        for k in 0..ip.path_count() {
            snapped[nd + k] = 1.0;
        }
        let pos = ip.positions(&z);
        if max_safe_step(&pos, &ip.displacement(&(&snapped - &z)), &ip.collider) < 1.0 {
            return Err(Error::StepFailure { t: t_end, message: "final scripted-body snap would collide".into() });
        }
        z = snapped;
        ip.path_fixed = true;
    }
    report.potentials.push(newton(&ip, &mut z, params.newton_tol_m_per_s, params.max_newton_iters, &mut used, t_end)?);
    report.newton_iterations = used;
    let x = ip.nodes(&z);
    let pos = ip.positions(&z);
    let pairs = active_pairs(&pos, &ip.collider, dhat).map_err(|e| Error::StepFailure { t: t_end, message: e.to_string() })?;
    report.min_distance = pairs.iter().map(|p| p.distance).fold(f64::INFINITY, f64::min);
    let next_kappa = if report.min_distance < 1e-2 * dhat { 2.0 * kappa } else { kappa };
    let v = x.iter().zip(&state.x).map(|(a, b)| (a - b) / dt).collect();
    Ok((
        SimState { x, v, t: t_end, separated: state.separated.clone(), pieces: state.pieces, kappa: next_kappa },
        report,
    ))
}
