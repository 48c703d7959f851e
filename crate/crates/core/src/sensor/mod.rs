//! Glove streams: frame format, taxel force laws, synthetic IMU data and analysis channels.

pub mod channels;
pub mod force;
pub mod frame;
pub mod noise;
pub mod scenario;
pub mod taxel;

pub use channels::{extract_channels, AnalysisChannels};
pub use force::{force_to_voltage, voltage_to_force, ForceCalibration, ForceReading};
pub use frame::{read_stream, read_stream_file, write_stream, FrameReader, GloveFrame, IMU_COUNT};
pub use noise::{synth_imu_stream, HandSample, ImuNoiseModel};
pub use scenario::{scenario_samples, Scenario};
pub use taxel::{Region, Taxel, TaxelLayout, TaxelSite, PALM_TAXELS, TAXEL_COUNT};
