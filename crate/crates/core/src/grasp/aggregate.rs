//! Per-phalanx Gaussian summaries of contacts gathered over many trials.

use std::collections::BTreeMap;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

use super::log::ContactLogEntry;
use super::state::GraspPhase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactCluster {
    pub phalanx: usize,
    pub count: usize,
    pub mean: Vec3,
    /// Sample covariance (n - 1 normalisation), object frame, m².
    pub covariance: Matrix3<f64>,
    /// Set when the cluster has a single sample and the covariance is undefined.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactSummary {
    pub trials: usize,
    pub clusters: Vec<ContactCluster>,
}

/// Sample mean and covariance; a single sample yields zero covariance.
pub fn gaussian_fit(points: &[Vec3]) -> (Vec3, Matrix3<f64>) {
    let n = points.len();
    let mean = points.iter().sum::<Vec3>() / n as f64;
    let mut cov = Matrix3::zeros();
    if n > 1 {
        for p in points {
            let d = p - mean;
            cov += d * d.transpose();
        }
        cov /= (n - 1) as f64;
        cov = (cov + cov.transpose()) * 0.5;
    }
    (mean, cov)
}

/// Groups caged-phase contacts of every trial by phalanx, in the object frame.
pub fn aggregate_contacts(logs: &[Vec<ContactLogEntry>]) -> Result<ContactSummary> {
    if logs.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{} contact logs, need at least 2", logs.len())));
    }
    let mut groups: BTreeMap<usize, Vec<Vec3>> = BTreeMap::new();
    for entry in logs.iter().flatten().filter(|e| e.phase == GraspPhase::Caged) {
        for (id, p) in entry.local_contacts() {
            groups.entry(id).or_default().push(p);
        }
    }
    let clusters = groups
        .into_iter()
        .map(|(phalanx, pts)| {
            let (mean, covariance) = gaussian_fit(&pts);
            ContactCluster { phalanx, count: pts.len(), mean, covariance, degenerate: pts.len() < 2 }
        })
        .collect();
    Ok(ContactSummary { trials: logs.len(), clusters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grasp::collision::{CollisionPoint, HAPTIC_CHANNELS};
    use crate::math::Pose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn entry(contacts: Vec<(usize, Vec3)>, pose: Pose) -> ContactLogEntry {
        ContactLogEntry {
            t: 0.0,
            phase: GraspPhase::Caged,
            contacts: contacts
                .into_iter()
                .map(|(phalanx, p)| CollisionPoint {
                    position: pose.transform_point(&p.into()).coords,
                    phalanx,
                    depth: 0.001,
                })
                .collect(),
            haptics: [true; HAPTIC_CHANNELS],
            object_pose: pose,
        }
    }

    #[test]
    fn identical_logs() {
        let pts = vec![(1, Vec3::new(0.01, 0.0, 0.02)), (4, Vec3::new(-0.01, 0.0, 0.02))];
        let log = vec![entry(pts.clone(), Pose::translation(0.3, 0.0, 0.0))];
        let s = aggregate_contacts(&[log.clone(), log]).unwrap();
        assert_eq!(s.clusters.len(), 2);
        for (c, (id, p)) in s.clusters.iter().zip(&pts) {
            assert_eq!(c.phalanx, *id);
            assert!((c.mean - p).norm() < 1e-15);
            assert!(c.covariance.abs().max() < 1e-28);
            assert!(!c.degenerate);
        }
    }

    #[test]
    fn needs_two_logs() {
        assert!(matches!(aggregate_contacts(&[vec![]]), Err(Error::InsufficientSamples(_))));
    }

    #[test]
    fn single_sample_is_degenerate() {
        let a = vec![entry(vec![(2, Vec3::x())], Pose::identity())];
        let s = aggregate_contacts(&[a, vec![]]).unwrap();
        assert!(s.clusters[0].degenerate);
        assert_eq!(s.clusters[0].covariance, Matrix3::zeros());
    }

    #[test]
    fn disjoint_labels_stay_separate() {
        let a = vec![entry(vec![(1, Vec3::x())], Pose::identity())];
        let b = vec![entry(vec![(7, Vec3::y())], Pose::identity())];
        let s = aggregate_contacts(&[a, b]).unwrap();
        assert_eq!(s.clusters.iter().map(|c| c.phalanx).collect::<Vec<_>>(), vec![1, 7]);
        assert_eq!(s.clusters[0].mean, Vec3::x());
        assert_eq!(s.clusters[1].mean, Vec3::y());
    }

    #[test]
    fn recovers_known_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = Normal::new(0.0, 0.005).unwrap();
        let centre = Vec3::new(0.02, -0.01, 0.03);
        let logs: Vec<_> = (0..200)
            .map(|_| {
                let p = centre + Vec3::new(n.sample(&mut rng), n.sample(&mut rng), n.sample(&mut rng));
                vec![entry(vec![(5, p)], Pose::translation(0.1, 0.2, 0.0))]
            })
            .collect();
        let s = aggregate_contacts(&logs).unwrap();
        let c = &s.clusters[0];
        for k in 0..3 {
            let sigma = c.covariance[(k, k)].sqrt();
            assert!((sigma - 0.005).abs() < 0.001, "{sigma}");
        }
        assert!((c.mean - centre).norm() < 0.002);
        assert!(c.covariance.symmetric_eigenvalues().min() >= -1e-18);
    }
}
