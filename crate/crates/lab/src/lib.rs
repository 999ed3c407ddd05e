//! Experiment harness for `graphon-signal`: configuration, instance
//! generation and the verification suites behind the `graphon-lab` binary.

pub mod config;
pub mod generate;
pub mod suites;
