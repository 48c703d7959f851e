//! Point-triangle barrier contact: distances, the clamped log barrier, pair search and
//! conservative step bounds.

use nalgebra::{SMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::closest_point_on_triangle;
use crate::math::Vec3;

/// `-(d - dhat)² ln(d / dhat)` for `0 < d < dhat`, else 0.
pub fn barrier(d: f64, dhat: f64) -> f64 {
    if d >= dhat {
        0.0
    } else {
        -(d - dhat).powi(2) * (d / dhat).ln()
    }
}

pub fn barrier_d1(d: f64, dhat: f64) -> f64 {
    if d >= dhat {
        0.0
    } else {
        -2.0 * (d - dhat) * (d / dhat).ln() - (d - dhat).powi(2) / d
    }
}

pub fn barrier_d2(d: f64, dhat: f64) -> f64 {
    if d >= dhat {
        0.0
    } else {
        let r = (d - dhat) / d;
        -2.0 * (d / dhat).ln() - 4.0 * r + r * r
    }
}

/// Unsigned point-triangle distance, its gradient over `(p, a, b, c)`, and the closest
/// point's barycentric weights.
pub fn point_triangle_distance_grad(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (f64, [Vec3; 4], [f64; 3]) {
    let (q, w) = closest_point_on_triangle(p, a, b, c);
    let diff = p - q;
    let d = diff.norm();
    let n = if d > 0.0 { diff / d } else { Vec3::zeros() };
    (d, [n, -n * w[0], -n * w[1], -n * w[2]], w)
}

pub type Mat12 = SMatrix<f64, 12, 12>;

/// Hessian of the point-triangle distance over `(p, a, b, c)`, by central differences of
/// the analytic gradient with a step proportional to the distance.
pub fn point_triangle_distance_hessian(x: &[Vec3; 4]) -> Mat12 {
    let grad = |y: &[Vec3; 4]| point_triangle_distance_grad(&y[0], &y[1], &y[2], &y[3]);
    let h = 1e-4 * grad(x).0;
    let mut out = Mat12::zeros();
    if h == 0.0 {
        return out;
    }
    for col in 0..12 {
        let (mut xp, mut xm) = (*x, *x);
        xp[col / 3][col % 3] += h;
        xm[col / 3][col % 3] -= h;
        let (gp, gm) = (grad(&xp).1, grad(&xm).1);
        for row in 0..12 {
            out[(row, col)] = (gp[row / 3][row % 3] - gm[row / 3][row % 3]) / (2.0 * h);
        }
    }
    (out + out.transpose()) * 0.5
}

/// Closest positive semidefinite matrix by clamping eigenvalues.
pub fn project_psd12(m: Mat12) -> Mat12 {
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().all(|&e| e >= 0.0) {
        return m;
    }
    let clamped = eig.eigenvalues.map(|e| e.max(0.0));
    eig.eigenvectors * Mat12::from_diagonal(&clamped) * eig.eigenvectors.transpose()
}

/// Projected Hessian of `barrier(d)` for one pair, over its four points.
pub fn pair_barrier_hessian(pair: &ContactPair, pos: &[Vec3], c: &Collider, dhat: f64) -> Mat12 {
    let idx = pair.indices(c);
    let x = idx.map(|i| pos[i]);
    let mut g = SMatrix::<f64, 12, 1>::zeros();
    for k in 0..4 {
        g.fixed_rows_mut::<3>(3 * k).copy_from(&pair.grad[k]);
    }
    let h = g * g.transpose() * barrier_d2(pair.distance, dhat)
        + point_triangle_distance_hessian(&x) * barrier_d1(pair.distance, dhat);
    project_psd12(h)
}

/// Points and triangles that can touch, over a unified index space: tet nodes first,
/// then the vertices of each scripted body in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Collider {
    pub node_count: usize,
    /// Start index of each body's vertices.
    pub body_offsets: Vec<usize>,
    pub point_count: usize,
    /// Candidate contact points (surface nodes and all body vertices).
    pub points: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
    /// `None` for object triangles, `Some(body)` for scripted-body triangles.
    pub tri_owner: Vec<Option<usize>>,
}

impl Collider {
    pub fn new(surface: &[[usize; 3]], node_count: usize, bodies: &[(usize, &[[usize; 3]])]) -> Self {
        let mut on = vec![false; node_count];
        for f in surface {
            for &v in f {
                on[v] = true;
            }
        }
        let mut points: Vec<usize> = (0..node_count).filter(|&i| on[i]).collect();
        let mut triangles = surface.to_vec();
        let mut tri_owner = vec![None; surface.len()];
        let mut body_offsets = Vec::new();
        let mut next = node_count;
        for (b, (nverts, tris)) in bodies.iter().enumerate() {
            body_offsets.push(next);
            points.extend(next..next + nverts);
            triangles.extend(tris.iter().map(|t| [t[0] + next, t[1] + next, t[2] + next]));
            tri_owner.extend(std::iter::repeat_n(Some(b), tris.len()));
            next += nverts;
        }
        Collider { node_count, body_offsets, point_count: next, points, triangles, tri_owner }
    }

    pub fn owner(&self, point: usize) -> Option<usize> {
        if point < self.node_count {
            None
        } else {
            Some(self.body_offsets.iter().rposition(|&o| o <= point).expect("offset list covers points"))
        }
    }

    fn pair_allowed(&self, point: usize, tri: usize) -> bool {
        let t = self.triangles[tri];
        if t.contains(&point) {
            return false;
        }
        !(point >= self.node_count && self.tri_owner[tri].is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub point: usize,
    pub tri: usize,
    pub distance: f64,
    /// Gradient of the distance over the point and the triangle's three vertices.
    pub grad: [Vec3; 4],
}

impl ContactPair {
    pub fn indices(&self, c: &Collider) -> [usize; 4] {
        let t = c.triangles[self.tri];
        [self.point, t[0], t[1], t[2]]
    }
}

fn tri_bounds(pos: &[Vec3], t: &[usize; 3], pad: f64) -> (Vec3, Vec3) {
    let (a, b, c) = (pos[t[0]], pos[t[1]], pos[t[2]]);
    (a.inf(&b).inf(&c) - Vec3::repeat(pad), a.sup(&b).sup(&c) + Vec3::repeat(pad))
}

fn inside(p: &Vec3, lo: &Vec3, hi: &Vec3) -> bool {
    (0..3).all(|k| p[k] >= lo[k] && p[k] <= hi[k])
}

/// Every allowed pair closer than `dhat`, in deterministic (triangle, point) order.
pub fn active_pairs(pos: &[Vec3], c: &Collider, dhat: f64) -> Result<Vec<ContactPair>> {
    let mut out = Vec::new();
    for (ti, t) in c.triangles.iter().enumerate() {
        let (lo, hi) = tri_bounds(pos, t, dhat);
        for &p in &c.points {
            if !inside(&pos[p], &lo, &hi) || !c.pair_allowed(p, ti) {
                continue;
            }
            let (d, grad, _) = point_triangle_distance_grad(&pos[p], &pos[t[0]], &pos[t[1]], &pos[t[2]]);
            if d <= 0.0 {
                return Err(Error::InvariantViolation(format!("point {p} touches triangle {ti} (distance {d})")));
            }
            if d < dhat {
                out.push(ContactPair { point: p, tri: ti, distance: d, grad });
            }
        }
    }
    Ok(out)
}

/// Sum of `barrier(d)` over active pairs, times `kappa`.
pub fn barrier_energy(pos: &[Vec3], c: &Collider, dhat: f64, kappa: f64) -> Result<f64> {
    Ok(active_pairs(pos, c, dhat)?.iter().map(|p| kappa * barrier(p.distance, dhat)).sum())
}

/// Exhaustive minimum distance over all allowed point-triangle pairs.
pub fn min_distance(pos: &[Vec3], c: &Collider) -> f64 {
    let mut best = f64::INFINITY;
    for (ti, t) in c.triangles.iter().enumerate() {
        for &p in &c.points {
            if c.pair_allowed(p, ti) {
                let (d, _, _) = point_triangle_distance_grad(&pos[p], &pos[t[0]], &pos[t[1]], &pos[t[2]]);
                best = best.min(d);
            }
        }
    }
    best
}

/// Largest fraction of a linear move a point-triangle pair can take while keeping at
/// least a tenth of its current distance; conservative advancement on a motion bound.
pub fn pair_time_of_impact(x: [Vec3; 4], p: [Vec3; 4]) -> f64 {
    const KEEP: f64 = 0.1;
    const MAX_ITERS: usize = 100_000;
    let mean = (p[1] + p[2] + p[3]) / 3.0;
    let lp = (p[0] - mean).norm() + (1..4).map(|k| (p[k] - mean).norm()).fold(0.0, f64::max);
    if lp == 0.0 {
        return 1.0;
    }
    let dist = |t: f64| {
        let y: Vec<Vec3> = (0..4).map(|k| x[k] + p[k] * t).collect();
        point_triangle_distance_grad(&y[0], &y[1], &y[2], &y[3]).0
    };
    let d0 = dist(0.0);
    let gap = KEEP * d0;
    let mut t = 0.0;
    let mut step = (1.0 - KEEP) * d0 / lp;
    for _ in 0..MAX_ITERS {
        let d = dist(t + step);
        if t > 0.0 && d < gap {
            return t;
        }
        t += step;
        if t >= 1.0 {
            return 1.0;
        }
        step = 0.9 * d / lp;
    }
    t
}

/// Largest step in `[0, 1]` along `disp` that no allowed pair can tunnel through.
pub fn max_safe_step(pos: &[Vec3], disp: &[Vec3], c: &Collider) -> f64 {
    let mut alpha: f64 = 1.0;
    let swept = |i: usize| {
        let (a, b) = (pos[i], pos[i] + disp[i]);
        (a.inf(&b), a.sup(&b))
    };
    for (ti, t) in c.triangles.iter().enumerate() {
        let (mut lo, mut hi) = swept(t[0]);
        for &v in &t[1..] {
            let (l, h) = swept(v);
            lo = lo.inf(&l);
            hi = hi.sup(&h);
        }
        for &p in &c.points {
            let (pl, ph) = swept(p);
            if (0..3).any(|k| ph[k] < lo[k] || pl[k] > hi[k]) || !c.pair_allowed(p, ti) {
                continue;
            }
            let x = [pos[p], pos[t[0]], pos[t[1]], pos[t[2]]];
            let d = [disp[p], disp[t[0]], disp[t[1]], disp[t[2]]];
            alpha = alpha.min(pair_time_of_impact(x, d));
        }
    }
    alpha
}
