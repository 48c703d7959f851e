use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Finger;

pub const TAXEL_COUNT: usize = 26;
pub const PALM_TAXELS: usize = 16;

/// Where on the hand a taxel sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "site", rename_all = "lowercase")]
pub enum TaxelSite {
    Palm { row: u8, col: u8 },
    Proximal { finger: Finger },
    Distal { finger: Finger },
}

impl TaxelSite {
    /// Region label used for region-level aggregation.
    pub fn region(&self) -> Region {
        match self {
            TaxelSite::Palm { .. } => Region::Palm,
            TaxelSite::Proximal { finger } | TaxelSite::Distal { finger } => Region::Finger(*finger),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Palm,
    Finger(Finger),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taxel {
    /// Position of this taxel's voltage in a frame's taxel array.
    pub id: usize,
    #[serde(flatten)]
    pub site: TaxelSite,
}

/// 4x4 palm grid plus a proximal and a distal pad on every finger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxelLayout {
    pub taxels: Vec<Taxel>,
}

impl Default for TaxelLayout {
    fn default() -> Self {
        let mut taxels = Vec::with_capacity(TAXEL_COUNT);
        for row in 0..4u8 {
            for col in 0..4u8 {
                taxels.push(Taxel { id: taxels.len(), site: TaxelSite::Palm { row, col } });
            }
        }
        for finger in Finger::ALL {
            taxels.push(Taxel { id: taxels.len(), site: TaxelSite::Proximal { finger } });
            taxels.push(Taxel { id: taxels.len(), site: TaxelSite::Distal { finger } });
        }
        TaxelLayout { taxels }
    }
}

impl TaxelLayout {
    pub fn validate(&self) -> Result<()> {
        if self.taxels.len() != TAXEL_COUNT {
            return Err(Error::LayoutMismatch(format!(
                "taxel layout has {} entries, expected {TAXEL_COUNT}",
                self.taxels.len()
            )));
        }
        let mut seen = [false; TAXEL_COUNT];
        for t in &self.taxels {
            if t.id >= TAXEL_COUNT || std::mem::replace(&mut seen[t.id], true) {
                return Err(Error::LayoutMismatch(format!("taxel id {} out of range or repeated", t.id)));
            }
        }
        let palm = self.palm_ids().len();
        if palm != PALM_TAXELS {
            return Err(Error::LayoutMismatch(format!("{palm} palm taxels, expected {PALM_TAXELS}")));
        }
        Ok(())
    }

    pub fn palm_ids(&self) -> Vec<usize> {
        self.taxels
            .iter()
            .filter(|t| matches!(t.site, TaxelSite::Palm { .. }))
            .map(|t| t.id)
            .collect()
    }

    pub fn region_ids(&self, region: Region) -> Vec<usize> {
        self.taxels.iter().filter(|t| t.site.region() == region).map(|t| t.id).collect()
    }

    pub fn distal(&self, finger: Finger) -> Option<usize> {
        self.taxels.iter().find(|t| t.site == TaxelSite::Distal { finger }).map(|t| t.id)
    }

    pub fn proximal(&self, finger: Finger) -> Option<usize> {
        self.taxels.iter().find(|t| t.site == TaxelSite::Proximal { finger }).map(|t| t.id)
    }
}
