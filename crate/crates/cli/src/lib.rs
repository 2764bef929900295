//! Configuration-driven experiment runner behind the `sidlab` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod run;

pub use config::{parse_config, ConfigError, ConfigErrors, ExperimentConfig};
pub use run::{run_command, write_artifacts, Artifact, RunError, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KernelInfo,
    Analyze,
    Flow,
    Simulate,
    MonteCarlo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::KernelInfo => "kernel-info",
            Self::Analyze => "analyze",
            Self::Flow => "flow",
            Self::Simulate => "simulate",
            Self::MonteCarlo => "montecarlo",
        }
    }
}
