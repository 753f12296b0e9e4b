//! Command-line and HTTP front ends for `delaystab-core`.

pub mod jobs;
pub mod service;
