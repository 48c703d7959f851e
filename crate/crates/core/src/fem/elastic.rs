//! Stable Neo-Hookean elasticity on linear tetrahedra.
//!
//! `Ψ(F) = μ/2 (tr FᵀF − 3) − μ (J − 1) + λ'/2 (J − 1)²` with `λ' = λ + μ`, which has
//! zero energy and stress at rest and matches linear elasticity for small strains.

use nalgebra::{Matrix3, SMatrix, SVector, SymmetricEigen};

use crate::math::Vec3;

use super::material::MaterialParams;
use super::tetmesh::{edge_matrix, TetMesh};

pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Mat12 = SMatrix<f64, 12, 12>;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Lame {
    mu: f64,
    lambda: f64,
}

impl Lame {
    pub(crate) fn from(material: &MaterialParams) -> Self {
        let (mu, lambda) = material.lame();
        Lame { mu, lambda: lambda + mu }
    }
}

fn cofactor(f: &Matrix3<f64>) -> Matrix3<f64> {
    let (f0, f1, f2) = (f.column(0), f.column(1), f.column(2));
    Matrix3::from_columns(&[f1.cross(&f2), f2.cross(&f0), f0.cross(&f1)])
}

fn psi(f: &Matrix3<f64>, l: Lame) -> f64 {
    let j = f.determinant();
    0.5 * l.mu * (f.norm_squared() - 3.0) - l.mu * (j - 1.0) + 0.5 * l.lambda * (j - 1.0).powi(2)
}

fn pk1(f: &Matrix3<f64>, l: Lame) -> Matrix3<f64> {
    let j = f.determinant();
    f * l.mu + cofactor(f) * (l.lambda * (j - 1.0) - l.mu)
}

fn cross_matrix(a: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// `∂P/∂F` on column-major `vec(F)`.
fn dpdf(f: &Matrix3<f64>, l: Lame) -> Mat9 {
    let j = f.determinant();
    let c = cofactor(f);
    let vc = SVector::<f64, 9>::from_column_slice(c.as_slice());
    let mut h = Mat9::identity() * l.mu + vc * vc.transpose() * l.lambda;
    let s = l.lambda * (j - 1.0) - l.mu;
    let col = |k: usize| -> Vec3 { f.column(k).into() };
    let blocks = [
        (0, 1, -cross_matrix(&col(2))),
        (0, 2, cross_matrix(&col(1))),
        (1, 2, -cross_matrix(&col(0))),
        (1, 0, cross_matrix(&col(2))),
        (2, 0, -cross_matrix(&col(1))),
        (2, 1, cross_matrix(&col(0))),
    ];
    for (r, cidx, b) in blocks {
        let mut view = h.fixed_view_mut::<3, 3>(3 * r, 3 * cidx);
        view += b * s;
    }
    h
}

/// `∂vec(F)/∂x` for the tet's 12 coordinates.
fn dfdx(b: &Matrix3<f64>) -> SMatrix<f64, 9, 12> {
    let mut m = SMatrix::<f64, 9, 12>::zeros();
    for j in 0..3 {
        let s: f64 = (0..3).map(|k| b[(k, j)]).sum();
        for i in 0..3 {
            m[(i + 3 * j, i)] = -s;
            for a in 1..4 {
                m[(i + 3 * j, 3 * a + i)] = b[(a - 1, j)];
            }
        }
    }
    m
}

fn project_psd(m: Mat9) -> Mat9 {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    if eig.eigenvalues.iter().all(|&e| e >= 0.0) {
        return sym;
    }
    let clamped = eig.eigenvalues.map(|e| e.max(0.0));
    eig.eigenvectors * Mat9::from_diagonal(&clamped) * eig.eigenvectors.transpose()
}

pub fn deformation_gradient(x: &[Vec3], mesh: &TetMesh, tet: usize) -> Matrix3<f64> {
    edge_matrix(x, &mesh.tets[tet]) * mesh.dm_inv[tet]
}

pub fn tet_energy(x: &[Vec3], mesh: &TetMesh, material: &MaterialParams, tet: usize) -> f64 {
    mesh.rest_volume[tet] * psi(&deformation_gradient(x, mesh, tet), Lame::from(material))
}

/// Total elastic energy in joules.
pub fn elastic_energy(x: &[Vec3], mesh: &TetMesh, material: &MaterialParams) -> f64 {
    let l = Lame::from(material);
    (0..mesh.tets.len()).map(|t| mesh.rest_volume[t] * psi(&deformation_gradient(x, mesh, t), l)).sum()
}

/// Energy gradient per node (the negated internal force).
pub fn elastic_gradient(x: &[Vec3], mesh: &TetMesh, material: &MaterialParams) -> Vec<Vec3> {
    let l = Lame::from(material);
    let mut g = vec![Vec3::zeros(); x.len()];
    for (t, tet) in mesh.tets.iter().enumerate() {
        let f = deformation_gradient(x, mesh, t);
        let h = pk1(&f, l) * mesh.dm_inv[t].transpose() * mesh.rest_volume[t];
        let mut sum = Vec3::zeros();
        for a in 0..3 {
            let col: Vec3 = h.column(a).into();
            g[tet[a + 1]] += col;
            sum += col;
        }
        g[tet[0]] -= sum;
    }
    g
}

/// 12×12 Hessian of one tet's energy; with `project` the stress derivative is clamped to
/// be positive semidefinite first.
pub fn tet_hessian(x: &[Vec3], mesh: &TetMesh, material: &MaterialParams, tet: usize, project: bool) -> Mat12 {
    let f = deformation_gradient(x, mesh, tet);
    let mut d = dpdf(&f, Lame::from(material));
    if project {
        d = project_psd(d);
    }
    let j = dfdx(&mesh.dm_inv[tet]);
    j.transpose() * d * j * mesh.rest_volume[tet]
}

/// Von Mises stress of the first Piola-Kirchhoff stress per tet, Pa.
pub fn von_mises(x: &[Vec3], mesh: &TetMesh, material: &MaterialParams) -> Vec<f64> {
    let l = Lame::from(material);
    (0..mesh.tets.len())
        .map(|t| {
            let f = deformation_gradient(x, mesh, t);
            let p = pk1(&f, l);
            let j = f.determinant();
            let s = if j.abs() > 1e-12 { p * f.transpose() / j } else { p };
            let dev = s - Matrix3::identity() * (s.trace() / 3.0);
            (1.5 * dev.norm_squared()).sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rot_axis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube() -> TetMesh {
        TetMesh::grid_box(Vec3::zeros(), Vec3::repeat(1.0), [2, 2, 2]).unwrap()
    }

    #[test]
    fn rest_is_stress_free() {
        let m = cube();
        let mat = MaterialParams::walnut();
        assert_eq!(elastic_energy(&m.rest, &m, &mat), 0.0);
        let g = elastic_gradient(&m.rest, &m, &mat);
        assert!(g.iter().all(|v| v.norm() < 1e-6), "{:?}", g.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn uniaxial_strain_matches_small_strain_energy() {
        let m = cube();
        let mat = MaterialParams::carrot();
        let eps = 0.01;
        let x: Vec<Vec3> = m.rest.iter().map(|p| Vec3::new(p.x * (1.0 + eps), p.y, p.z)).collect();
        let e = elastic_energy(&x, &m, &mat);
        let oracle = 0.5 * mat.constrained_modulus() * eps * eps * 1.0;
        assert!((e - oracle).abs() / oracle < 0.05, "{e} vs {oracle}");
    }

    #[test]
    fn rigid_rotation_costs_nothing() {
        let m = cube();
        let mat = MaterialParams::walnut();
        let r = rot_axis(&Vec3::new(1.0, 2.0, -0.5), 1.1);
        let x: Vec<Vec3> = m.rest.iter().map(|p| r * p + Vec3::new(0.3, 0.0, 1.0)).collect();
        assert!(elastic_energy(&x, &m, &mat).abs() < 1e-3);
    }

    fn perturbed(m: &TetMesh, seed: u64, amp: f64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        m.rest
            .iter()
            .map(|p| p + Vec3::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
            .collect()
    }

    #[test]
    fn gradient_matches_central_differences() {
        let m = cube();
        let mat = MaterialParams { youngs_modulus_pa: 1e4, ..MaterialParams::carrot() };
        let x = perturbed(&m, 3, 0.08);
        let g = elastic_gradient(&x, &m, &mat);
        let h = 1e-6;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..x.len() {
            for k in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i][k] += h;
                xm[i][k] -= h;
                let fd = (elastic_energy(&xp, &m, &mat) - elastic_energy(&xm, &m, &mat)) / (2.0 * h);
                num += (fd - g[i][k]).powi(2);
                den += fd * fd;
            }
        }
        assert!((num / den).sqrt() < 1e-6, "{}", (num / den).sqrt());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let m = TetMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()],
            vec![[0, 1, 2, 3]],
        )
        .unwrap();
        let mat = MaterialParams { youngs_modulus_pa: 1e3, ..MaterialParams::walnut() };
        let x = perturbed(&m, 9, 0.2);
        let hess = tet_hessian(&x, &m, &mat, 0, false);
        let h = 1e-6;
        for c in 0..12 {
            let (node, k) = (c / 3, c % 3);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[node][k] += h;
            xm[node][k] -= h;
            let gp = elastic_gradient(&xp, &m, &mat);
            let gm = elastic_gradient(&xm, &m, &mat);
            for r in 0..12 {
                let fd = (gp[r / 3][r % 3] - gm[r / 3][r % 3]) / (2.0 * h);
                assert!((fd - hess[(r, c)]).abs() < 1e-4 * (1.0 + fd.abs()), "({r},{c}) {fd} {}", hess[(r, c)]);
            }
        }
    }

    #[test]
    fn projected_hessian_is_psd() {
        let m = cube();
        let mat = MaterialParams::walnut();
        let x = perturbed(&m, 4, 0.2);
        for t in 0..m.tets.len() {
            let h = tet_hessian(&x, &m, &mat, t, true);
            let min = SymmetricEigen::new(h).eigenvalues.min();
            assert!(min > -1e-6 * h.norm(), "{min}");
        }
    }

    #[test]
    fn von_mises_zero_at_rest_and_positive_under_shear() {
        let m = cube();
        let mat = MaterialParams::carrot();
        assert!(von_mises(&m.rest, &m, &mat).iter().all(|&s| s.abs() < 1e-6));
        let x: Vec<Vec3> = m.rest.iter().map(|p| Vec3::new(p.x + 0.05 * p.y, p.y, p.z)).collect();
        assert!(von_mises(&x, &m, &mat).iter().all(|&s| s > 0.0));
    }
}
