use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub youngs_modulus_pa: f64,
    pub poisson_ratio: f64,
    pub density_kg_m3: f64,
    /// Stretch ratio above which an interior face separates.
    pub fracture_stretch: f64,
}

impl MaterialParams {
    /// Walnut-shell-like placeholder.
    pub fn walnut() -> Self {
        MaterialParams { youngs_modulus_pa: 300e6, poisson_ratio: 0.3, density_kg_m3: 700.0, fracture_stretch: 1.1 }
    }

    /// Carrot-like placeholder.
    pub fn carrot() -> Self {
        MaterialParams { youngs_modulus_pa: 5e6, poisson_ratio: 0.45, density_kg_m3: 1000.0, fracture_stretch: 1.1 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.youngs_modulus_pa > 0.0
            && self.youngs_modulus_pa.is_finite()
            && (0.0..0.5).contains(&self.poisson_ratio)
            && self.density_kg_m3 > 0.0
            && self.density_kg_m3.is_finite()
            && self.fracture_stretch > 1.0
            && self.fracture_stretch.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid material {self:?}")))
        }
    }

    /// Lamé parameters `(mu, lambda)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus_pa, self.poisson_ratio);
        (e / (2.0 * (1.0 + nu)), e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)))
    }

    /// P-wave (constrained) modulus `lambda + 2 mu`.
    pub fn constrained_modulus(&self) -> f64 {
        let (mu, lambda) = self.lame();
        lambda + 2.0 * mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_values() {
        let (mu, lambda) = MaterialParams::walnut().lame();
        assert!((mu - 300e6 / 2.6).abs() < 1e-3);
        assert!((lambda - 300e6 * 0.3 / (1.3 * 0.4)).abs() < 1e-3);
    }

    #[test]
    fn bounds() {
        assert!(MaterialParams::carrot().validate().is_ok());
        for bad in [
            MaterialParams { poisson_ratio: 0.5, ..MaterialParams::walnut() },
            MaterialParams { youngs_modulus_pa: 0.0, ..MaterialParams::walnut() },
            MaterialParams { fracture_stretch: 1.0, ..MaterialParams::walnut() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
