//! Contact logs as line-delimited JSON.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{pose_from_array, pose_to_array, Pose, Vec3};

use super::collision::{CollisionPoint, HAPTIC_CHANNELS};
use super::state::GraspPhase;

/// One frame of grasp output. Contact positions are in the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactLogEntry {
    pub t: f64,
    pub phase: GraspPhase,
    pub contacts: Vec<CollisionPoint>,
    pub haptics: [bool; HAPTIC_CHANNELS],
    pub object_pose: Pose,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    t: f64,
    phase: GraspPhase,
    contacts: Vec<CollisionPoint>,
    haptics: Vec<bool>,
    object_pose: [f64; 7],
}

impl ContactLogEntry {
    /// Contact positions in the object's local frame.
    pub fn local_contacts(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        let inv = self.object_pose.inverse();
        self.contacts.iter().map(move |c| (c.phalanx, inv.transform_point(&c.position.into()).coords))
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(&EntryRecord {
            t: self.t,
            phase: self.phase,
            contacts: self.contacts.clone(),
            haptics: self.haptics.to_vec(),
            object_pose: pose_to_array(&self.object_pose),
        })?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let rec: EntryRecord = serde_json::from_str(line)?;
        let haptics: [bool; HAPTIC_CHANNELS] = rec.haptics.try_into().map_err(|h: Vec<bool>| {
            Error::LayoutMismatch(format!("{} haptic channels, expected {HAPTIC_CHANNELS}", h.len()))
        })?;
        if let Some(c) = rec.contacts.iter().find(|c| c.phalanx >= HAPTIC_CHANNELS || !(c.depth >= 0.0)) {
            return Err(Error::InvalidArgument(format!("bad contact {c:?}")));
        }
        Ok(ContactLogEntry {
            t: rec.t,
            phase: rec.phase,
            contacts: rec.contacts,
            haptics,
            object_pose: pose_from_array(rec.object_pose)?,
        })
    }
}

pub type ContactLog = Vec<ContactLogEntry>;

pub fn write_contact_log<W: Write>(mut w: W, log: &[ContactLogEntry]) -> Result<()> {
    for e in log {
        writeln!(w, "{}", e.to_json_line()?)?;
    }
    Ok(())
}

pub fn read_contact_log<R: BufRead>(r: R) -> Result<ContactLog> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            ContactLogEntry::from_json_line(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?,
        );
    }
    Ok(out)
}

pub fn read_contact_log_file(path: &std::path::Path) -> Result<ContactLog> {
    read_contact_log(std::io::BufReader::new(std::fs::File::open(path)?))
}
