//! Closest-point and intersection primitives on points, segments and triangles.

use crate::math::Vec3;

/// Closest point on triangle `abc` to `p` together with its barycentric weights.
///
/// Region classification follows Ericson, *Real-Time Collision Detection*, 5.1.5.
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (Vec3, [f64; 3]) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, [1.0, 0.0, 0.0]);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, [0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, [1.0 - v, v, 0.0]);
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, [0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, [1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, [0.0, 1.0 - w, w]);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, [1.0 - v - w, v, w])
}

pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c).0).norm()
}

/// Closest point on segment `[a, b]` to `p`; returns the point and its parameter.
pub fn closest_point_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> (Vec3, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= f64::MIN_POSITIVE {
        return (*a, 0.0);
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (a + ab * t, t)
}

/// Closest points between segments `[p1, q1]` and `[p2, q2]` (Ericson 5.1.9).
pub fn closest_points_segments(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> (Vec3, Vec3) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let eps = 1e-300;
    let (s, t);
    if a <= eps && e <= eps {
        return (*p1, *p2);
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

/// Parameter `t` in `[0, 1]` where segment `[p, q]` crosses triangle `abc`, if it does.
pub fn segment_triangle_intersection(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<f64> {
    let dir = q - p;
    let hit = ray_triangle_intersection(p, &dir, a, b, c)?;
    (hit.t <= 1.0).then_some(hit.t)
}

/// Closest pair between a segment and a triangle: `(distance, point on segment, point on triangle)`.
pub fn segment_triangle_closest(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (f64, Vec3, Vec3) {
    if let Some(t) = segment_triangle_intersection(p, q, a, b, c) {
        let x = p + (q - p) * t;
        return (0.0, x, x);
    }
    let mut best = {
        let cp = closest_point_on_triangle(p, a, b, c).0;
        ((p - cp).norm(), *p, cp)
    };
    let cq = closest_point_on_triangle(q, a, b, c).0;
    let dq = (q - cq).norm();
    if dq < best.0 {
        best = (dq, *q, cq);
    }
    for (e0, e1) in [(a, b), (b, c), (c, a)] {
        let (s, t) = closest_points_segments(p, q, e0, e1);
        let d = (s - t).norm();
        if d < best.0 {
            best = (d, s, t);
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    pub t: f64,
    /// Barycentric weights of the hit for vertices b and c.
    pub u: f64,
    pub v: f64,
}

/// Möller–Trumbore ray/triangle test, two-sided, `t >= 0`.
pub fn ray_triangle_intersection(origin: &Vec3, dir: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<RayHit> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let tvec = origin - a;
    let u = tvec.dot(&pvec) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&qvec) * inv;
    (t >= 0.0).then_some(RayHit { t, u, v })
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> (Vec3, Vec3, Vec3) {
        (Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0))
    }

    #[test]
    fn closest_point_regions() {
        let (a, b, c) = tri();
        let (cp, w) = closest_point_on_triangle(&Vec3::new(0.2, 0.2, 1.0), &a, &b, &c);
        assert!((cp - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-15);
        assert!((w[0] - 0.6).abs() < 1e-15);
        let (cp, w) = closest_point_on_triangle(&Vec3::new(-1.0, -1.0, 0.0), &a, &b, &c);
        assert_eq!(cp, a);
        assert_eq!(w, [1.0, 0.0, 0.0]);
        let (cp, _) = closest_point_on_triangle(&Vec3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((cp - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closest_point_matches_dense_sampling() {
        let a = Vec3::new(0.1, -0.3, 0.2);
        let b = Vec3::new(1.1, 0.4, -0.2);
        let c = Vec3::new(-0.4, 0.9, 0.5);
        let queries = [Vec3::new(0.3, 0.3, 1.0), Vec3::new(2.0, 0.0, 0.0), Vec3::new(-1.0, 2.0, -1.0)];
        for p in queries {
            let d = point_triangle_distance(&p, &a, &b, &c);
            let n = 300;
            let mut best = f64::INFINITY;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let u = i as f64 / n as f64;
                    let v = j as f64 / n as f64;
                    let x = a + (b - a) * u + (c - a) * v;
                    best = best.min((p - x).norm());
                }
            }
            assert!(d <= best + 1e-12 && best - d < 5e-3, "{d} vs {best}");
        }
    }

    #[test]
    fn segment_crossing_triangle_has_zero_distance() {
        let (a, b, c) = tri();
        let (d, x, _) = segment_triangle_closest(&Vec3::new(0.2, 0.2, -1.0), &Vec3::new(0.2, 0.2, 1.0), &a, &b, &c);
        assert_eq!(d, 0.0);
        assert!((x - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-15);
        let (d, _, _) = segment_triangle_closest(&Vec3::new(2.0, 0.0, -1.0), &Vec3::new(2.0, 0.0, 1.0), &a, &b, &c);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parallel_segments() {
        let (s, t) = closest_points_segments(
            &Vec3::new(0.0, 0.0, 0.0),
            &Vec3::new(1.0, 0.0, 0.0),
            &Vec3::new(0.5, 1.0, 0.0),
            &Vec3::new(2.0, 1.0, 0.0),
        );
        assert!(((s - t).norm() - 1.0).abs() < 1e-15);
    }
}
