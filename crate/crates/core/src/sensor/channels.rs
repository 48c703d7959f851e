use crate::error::{Error, Result};
use crate::kinematics::{clamp_joint_limits, hand_angles_from_imus, Finger, HandGeometry};

use super::force::{voltage_to_force, ForceCalibration};
use super::frame::GloveFrame;
use super::taxel::{TaxelLayout, TAXEL_COUNT};

/// Per-frame analysis series: palm force, thumb-tip force and index MCP flexion.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisChannels {
    pub t: Vec<f64>,
    /// Mean of the 16 palm-grid forces.
    pub palm_force_n: Vec<f64>,
    pub thumb_tip_force_n: Vec<f64>,
    pub index_mcp_flexion_deg: Vec<f64>,
}

impl AnalysisChannels {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,palm_force_N,thumb_tip_force_N,index_mcp_flexion_deg\n");
        for i in 0..self.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.t[i], self.palm_force_n[i], self.thumb_tip_force_n[i], self.index_mcp_flexion_deg[i]
            ));
        }
        s
    }
}

/// Extracts the analysis channels from calibrated frames.
pub fn extract_channels(
    frames: &[GloveFrame],
    layout: &TaxelLayout,
    cal: &ForceCalibration,
    geometry: &HandGeometry,
) -> Result<AnalysisChannels> {
    layout.validate()?;
    let palm = layout.palm_ids();
    let thumb = layout
        .distal(Finger::Thumb)
        .ok_or_else(|| Error::LayoutMismatch("layout has no thumb distal taxel".into()))?;
    let mut out = AnalysisChannels::default();
    for f in frames {
        if f.taxel.len() != TAXEL_COUNT {
            return Err(Error::LayoutMismatch(format!(
                "frame at t={} has {} taxels, layout needs {TAXEL_COUNT}",
                f.t,
                f.taxel.len()
            )));
        }
        let force = |id: usize| voltage_to_force(f.taxel[id], cal).newtons;
        let palm_mean = palm.iter().map(|&id| force(id)).sum::<f64>() / palm.len() as f64;
        let angles = hand_angles_from_imus(geometry, &f.imu)?;
        let index = clamp_joint_limits(angles.finger(Finger::Index));
        out.t.push(f.t);
        out.palm_force_n.push(palm_mean);
        out.thumb_tip_force_n.push(force(thumb));
        out.index_mcp_flexion_deg.push(index.theta1.to_degrees());
    }
    Ok(out)
}
