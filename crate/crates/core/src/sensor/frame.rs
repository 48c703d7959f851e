//! Glove frames and the line-delimited JSON stream format.
//!
//! One record per line: `t`, `imu` (15 `[w,x,y,z]`), `taxel` (26 volts),
//! `wrist` (`[w,x,y,z,px,py,pz]`) and an optional `tool` pose. Unknown keys are ignored.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{pose_from_array, pose_to_array, quat_from_wxyz, quat_to_wxyz, Pose, Quaternion};

use super::taxel::TAXEL_COUNT;

pub const IMU_COUNT: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct GloveFrame {
    pub t: f64,
    /// Palm, thumb x2, index x3, middle x3, ring x3, little x3.
    pub imu: Vec<Quaternion>,
    pub taxel: Vec<f64>,
    pub wrist: Pose,
    pub tool: Option<Pose>,
}

impl GloveFrame {
    pub fn validate(&self) -> Result<()> {
        if self.imu.len() != IMU_COUNT {
            return Err(Error::LayoutMismatch(format!("{} IMU samples, expected {IMU_COUNT}", self.imu.len())));
        }
        if self.taxel.len() != TAXEL_COUNT {
            return Err(Error::LayoutMismatch(format!("{} taxel voltages, expected {TAXEL_COUNT}", self.taxel.len())));
        }
        if let Some(v) = self.taxel.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("taxel voltage {v} must be finite and >= 0")));
        }
        if !self.t.is_finite() {
            return Err(Error::InvalidArgument("non-finite timestamp".into()));
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> Result<String> {
        let rec = FrameRecord {
            t: self.t,
            imu: self.imu.iter().map(quat_to_wxyz).collect(),
            taxel: self.taxel.clone(),
            wrist: pose_to_array(&self.wrist),
            tool: self.tool.as_ref().map(pose_to_array),
        };
        Ok(serde_json::to_string(&rec)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let rec: FrameRecord = serde_json::from_str(line)?;
        let imu = rec.imu.into_iter().map(quat_from_wxyz).collect::<Result<Vec<_>>>()?;
        let frame = GloveFrame {
            t: rec.t,
            imu,
            taxel: rec.taxel,
            wrist: pose_from_array(rec.wrist)?,
            tool: rec.tool.map(pose_from_array).transpose()?,
        };
        frame.validate()?;
        Ok(frame)
    }
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    t: f64,
    imu: Vec<[f64; 4]>,
    taxel: Vec<f64>,
    wrist: [f64; 7],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tool: Option<[f64; 7]>,
}

/// Sequential reader over a frame stream; enforces strictly increasing timestamps.
pub struct FrameReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    last_t: Option<f64>,
}

impl<R: BufRead> FrameReader<R> {
    pub fn new(reader: R) -> Self {
        FrameReader { lines: reader.lines(), line_no: 0, last_t: None }
    }
}

impl<R: BufRead> Iterator for FrameReader<R> {
    type Item = Result<GloveFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let line_no = self.line_no;
            let parsed = GloveFrame::from_json_line(&line)
                .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })
                .and_then(|f| match self.last_t {
                    Some(prev) if f.t <= prev => Err(Error::Parse {
                        line: line_no,
                        message: format!("timestamp {} does not increase past {prev}", f.t),
                    }),
                    _ => Ok(f),
                });
            if let Ok(f) = &parsed {
                self.last_t = Some(f.t);
            }
            return Some(parsed);
        }
    }
}

pub fn read_stream<R: BufRead>(reader: R) -> Result<Vec<GloveFrame>> {
    FrameReader::new(reader).collect()
}

pub fn read_stream_file(path: &std::path::Path) -> Result<Vec<GloveFrame>> {
    let file = std::fs::File::open(path)?;
    read_stream(std::io::BufReader::new(file))
}

pub fn write_stream<W: Write>(mut w: W, frames: &[GloveFrame]) -> Result<()> {
    for f in frames {
        writeln!(w, "{}", f.to_json_line()?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{rot_axis, Vec3};

    fn frame(t: f64) -> GloveFrame {
        GloveFrame {
            t,
            imu: (0..15).map(|k| rot_axis(&Vec3::new(1.0, 0.5, k as f64), 0.1 * k as f64)).collect(),
            taxel: (0..26).map(|k| 0.05 * k as f64).collect(),
            wrist: Pose::translation(0.1, 0.2, 0.3),
            tool: if t > 0.5 { Some(Pose::translation(0.0, 0.0, 1.0)) } else { None },
        }
    }

    #[test]
    fn line_round_trip() {
        for t in [0.0, 1.0] {
            let f = frame(t);
            let back = GloveFrame::from_json_line(&f.to_json_line().unwrap()).unwrap();
            assert_eq!(back.taxel, f.taxel);
            assert_eq!(back.tool.is_some(), f.tool.is_some());
            for (a, b) in back.imu.iter().zip(&f.imu) {
                assert!(a.angle_to(b) < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_keys_are_ignored() {
        let mut v: serde_json::Value = serde_json::from_str(&frame(0.0).to_json_line().unwrap()).unwrap();
        v["extra"] = serde_json::json!({"anything": 1});
        assert!(GloveFrame::from_json_line(&v.to_string()).is_ok());
    }

    #[test]
    fn missing_taxel_names_the_field() {
        let mut v: serde_json::Value = serde_json::from_str(&frame(0.0).to_json_line().unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("taxel");
        let text = format!("{}\n{}\n", frame(-1.0).to_json_line().unwrap(), v);
        let err = read_stream(text.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("taxel"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decreasing_timestamps_rejected() {
        let mut buf = Vec::new();
        write_stream(&mut buf, &[frame(0.2), frame(0.1)]).unwrap();
        assert!(matches!(read_stream(buf.as_slice()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn malformed_line_reports_number() {
        let text = format!("{}\n\n{{not json\n", frame(0.0).to_json_line().unwrap());
        assert!(matches!(read_stream(text.as_bytes()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn negative_voltage_rejected() {
        let mut f = frame(0.0);
        f.taxel[3] = -0.1;
        assert!(f.validate().is_err());
    }
}
