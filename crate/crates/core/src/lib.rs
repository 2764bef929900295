//! Numerical laboratory for symmetric self-interacting diffusions on the flat
//! torus `T^d`, `d ∈ {1, 2}`.
//!
//! * [`geometry`]: grids, densities, the Gibbs map and a weak metric.
//! * [`kernel`]: interaction potentials and their spectral analysis.
//! * [`dynamics`]: the free energy, the vector fields `X` and `Y`, their
//!   flows, fixed-point enumeration and classification.
//! * [`sde`]: Euler–Maruyama simulation of the diffusion driven by its own
//!   occupation measure, with Monte Carlo and shadowing diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod sde;
pub mod seed;

pub use dynamics::{FixedPointRecord, FlowTrace, MorseSum, SolverParams, SpectralReport, Verdict};
pub use error::{Error, Result};
pub use geometry::{
    gibbs, inner_product, weak_distance, DensityField, FourierModes, Grid, PotentialField,
    Wavevector, WeakMetricParams,
};
pub use kernel::{KernelReport, KernelSpec, MercerSplit, TrigBasis, TrigTerm};
pub use sde::{MonteCarloReport, OccupationState, SdeConfig, TrajectoryRecord};

/// Version string embedded in every artifact.
pub const TOOL_VERSION: &str = concat!("sidlab ", env!("CARGO_PKG_VERSION"));
