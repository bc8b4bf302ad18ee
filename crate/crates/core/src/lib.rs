//! Fast-scale (subharmonic) instability analysis for current-mode
//! controlled DC-DC converters.

pub mod alpha;
pub mod config;
pub mod error;
pub mod ftransform;
pub mod loopgain;
pub mod output;
pub mod report;
pub mod sda;
pub mod sim;
pub mod stability;
pub mod sweep;

pub use config::{ConverterConfig, Scheme, Topology, VoltageLoop};
pub use error::{Error, Result};
