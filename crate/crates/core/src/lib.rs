//! Optimal reflection configuration for reconfigurable intelligent surfaces
//! whose elements offer an arbitrary, non-uniform set of discrete phase shifts.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – complex-plane primitives (arguments, angles, rotations).
//! * [`channel`] – phase-shift sets, link budgets, channel realizations.
//! * [`optimizer`] – the separation-line sweep that finds the global optimum
//!   in time linear in the number of elements, plus the exhaustive and
//!   closest-point-projection baselines.
//! * [`metrics`] – capacity and performance gain.
//! * [`analysis`] – empty regions around separation lines and the empty ratio.
//! * [`experiment`] – seeded Monte Carlo scenarios and CSV output.
//! * [`exec`] – trial-level data parallelism with a sequential fallback.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod optimizer;

pub use channel::{ChannelRealization, ElementChoice, LinkBudget, PhaseShiftSet};
pub use error::{Error, Result};
pub use geometry::ComplexVec;
pub use optimizer::{
    cpp_optimize, exhaustive_optimize, sweep_optimize, CppMode, SeparationLine, SweepResult,
};
