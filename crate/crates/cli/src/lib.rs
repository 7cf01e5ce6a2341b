//! Benchmark harness around the `fssc` clustering library.

pub mod config;
pub mod report;
pub mod runner;
