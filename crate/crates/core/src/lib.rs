//! Stabilizability and PID stability regions for linear plants with one
//! time delay,
//!
//! `G(s) = K (1 + Z_1 s)...(1 + Z_m s) / ((1 + T_1 s)...(1 + T_n s)) e^{-L s}`.
//!
//! All analysis runs on the dimensionless plant (`t_i = T_i / L`,
//! `z_i = Z_i / L`) with controller parameters `h = K K_p`,
//! `h_i = K K_i L`, `h_d = K K_d / L`.

pub mod error;
pub mod exec;
pub mod export;
pub mod harmonic;
pub mod oracle;
pub mod plant;
pub mod poly;
pub mod region;
pub mod roots;
pub mod stabilizability;
pub mod sturm;

pub use error::{Error, Result};
pub use exec::Execution;
pub use harmonic::HarmonicContext;
pub use plant::{ControllerPoint, NormalizedPlant, PidGains, PlantSpec};
pub use stabilizability::{analyze, analyze_plant, StabilizabilityReport, Verdict};
pub use region::{stability_region, HInterval, RegionOptions, StabilityRegion};
