//! Taxel voltage to force conversion.
//!
//! Two fitted laws are available. The logarithmic law uses the natural log.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum ForceCalibration {
    /// `F = c1 * ln(c2 * V)`
    Logarithmic { c1: f64, c2: f64 },
    /// `F = a * V^b + c`
    Power { a: f64, b: f64, c: f64 },
}

impl Default for ForceCalibration {
    fn default() -> Self {
        ForceCalibration::logarithmic()
    }
}

impl ForceCalibration {
    pub fn logarithmic() -> Self {
        ForceCalibration::Logarithmic { c1: 0.569, c2: 44.98 }
    }

    pub fn power() -> Self {
        ForceCalibration::Power { a: -1.067, b: -0.4798, c: 3.244 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ForceCalibration::Logarithmic { c1, c2 } if c1 > 0.0 && c2 > 0.0 => Ok(()),
            ForceCalibration::Logarithmic { c1, c2 } => {
                Err(Error::InvalidArgument(format!("logarithmic coefficients must be positive, got ({c1}, {c2})")))
            }
            ForceCalibration::Power { a, b, c } if [a, b, c].iter().all(|v| v.is_finite()) => Ok(()),
            ForceCalibration::Power { .. } => Err(Error::InvalidArgument("non-finite power-law coefficients".into())),
        }
    }

    /// The fitted law without clamping, defined for `v > 0`.
    pub fn raw_force(&self, v: f64) -> f64 {
        match *self {
            ForceCalibration::Logarithmic { c1, c2 } => c1 * (c2 * v).ln(),
            ForceCalibration::Power { a, b, c } => a * v.powf(b) + c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceReading {
    pub newtons: f64,
    /// The reading fell at or below the law's zero crossing (or the voltage was not positive).
    pub below_threshold: bool,
}

pub fn voltage_to_force(v: f64, cal: &ForceCalibration) -> ForceReading {
    if !(v > 0.0) {
        return ForceReading { newtons: 0.0, below_threshold: true };
    }
    let f = cal.raw_force(v);
    if f > 0.0 {
        ForceReading { newtons: f, below_threshold: false }
    } else {
        ForceReading { newtons: 0.0, below_threshold: true }
    }
}

/// Inverse of the logarithmic law, `V = exp(F / c1) / c2`.
pub fn force_to_voltage(f: f64, cal: &ForceCalibration) -> Result<f64> {
    match *cal {
        ForceCalibration::Logarithmic { c1, c2 } => {
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::InvalidArgument(format!("force must be finite and >= 0, got {f}")));
            }
            Ok((f / c1).exp() / c2)
        }
        ForceCalibration::Power { .. } => {
            Err(Error::UnsupportedLaw("power law has no inverse over the full force range".into()))
        }
    }
}
