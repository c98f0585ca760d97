//! Optimal and baseline configuration solvers.
//!
//! Given the direction of the optimal overall channel, each element's best
//! choice follows from a single rule: take the candidate with the smallest
//! angle to that direction if the angle is acute, otherwise switch the
//! element off ([`config_given_direction`]). The direction is unknown, but the
//! per-element choices only change at separation lines, so trying one
//! configuration per sector between consecutive lines is enough
//! ([`sweep_optimize`]).

mod baselines;
mod lines;
mod sweep;

use serde::Serialize;

use crate::channel::{ChannelRealization, ElementChoice, LinkBudget, PhaseShiftSet};
use crate::geometry::{angular_distance, classify_right_angle, ComplexVec, RightAngle};
use crate::metrics::{capacity, CapacityReport};

pub use baselines::{
    continuous_upper_bound, cpp_optimize, exhaustive_optimize, exhaustive_optimize_with_cap,
    CppMode, DEFAULT_EXHAUSTIVE_CAP,
};
pub use lines::{
    separation_lines, sort_separation_lines, update_h, SeparationLine, SeparationMatrix, SortStats,
};
pub use sweep::{sweep_optimize, sweep_optimize_with, SweepOptions, SweepStats};

/// Outcome of any solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One choice per element, in the realization's element order.
    pub config: Vec<ElementChoice>,
    /// Overall channel achieved by `config`.
    pub h_star: ComplexVec,
    /// Winning sector in the sorted line order; `None` for non-sweep solvers.
    pub sector_index: Option<usize>,
    /// Per-sector `|h|` (zero-width sectors are `None`), when requested.
    pub candidates: Option<Vec<Option<f64>>>,
}

impl SweepResult {
    pub fn amplitude(&self) -> f64 {
        self.h_star.amplitude()
    }

    pub fn off_count(&self) -> usize {
        self.config.iter().filter(|c| !c.is_on()).count()
    }

    pub fn to_document(&self, budget: Option<&LinkBudget>) -> SolutionDocument {
        SolutionDocument {
            configuration: self.config.clone(),
            h_star: self.h_star,
            amplitude: self.amplitude(),
            capacity: budget.map(|b| capacity(self.h_star, b)),
        }
    }
}

/// JSON form of a solver result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionDocument {
    /// `0` for OFF, otherwise the one-based phase index.
    pub configuration: Vec<ElementChoice>,
    pub h_star: ComplexVec,
    pub amplitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<CapacityReport>,
}

/// Best choice for a single element when the optimal channel points at
/// `theta`.
pub fn choice_for_direction(v_n: ComplexVec, set: &PhaseShiftSet, theta: f64) -> ElementChoice {
    let base = v_n.arg_mod_2pi().expect("realization elements are nonzero");
    let mut best = 0;
    let mut best_angle = f64::INFINITY;
    for (i, &phi) in set.phases().iter().enumerate() {
        let a = angular_distance(base + phi, theta);
        if a < best_angle {
            best = i;
            best_angle = a;
        }
    }
    match classify_right_angle(best_angle) {
        RightAngle::Acute | RightAngle::Boundary => ElementChoice::On(best),
        RightAngle::Obtuse => ElementChoice::Off,
    }
}

/// Optimal configuration assuming the optimal channel has argument `theta`.
pub fn config_given_direction(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    theta: f64,
) -> Vec<ElementChoice> {
    real.elements()
        .iter()
        .map(|&v| choice_for_direction(v, set, theta))
        .collect()
}
