//! Capacity and the performance gain of one solver over another.

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::geometry::ComplexVec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub snr_linear: f64,
    pub capacity_bps: f64,
    /// Bits per second per hertz.
    pub spectral_efficiency: f64,
}

/// `C = B log2(1 + P|h|² / (B N0))`.
pub fn capacity(h: ComplexVec, budget: &LinkBudget) -> CapacityReport {
    let snr_linear = budget.snr_budget_linear() * h.norm_sqr();
    let spectral_efficiency = snr_linear.ln_1p() / std::f64::consts::LN_2;
    CapacityReport {
        snr_linear,
        capacity_bps: budget.bandwidth_hz * spectral_efficiency,
        spectral_efficiency,
    }
}

/// `100 · (C_proposed − C_cpp) / C_cpp`.
pub fn performance_gain(c_proposed: f64, c_cpp: f64) -> Result<f64> {
    if c_cpp.is_nan() || c_cpp <= 0.0 {
        return Err(Error::NonPositiveCapacity(c_cpp));
    }
    Ok(100.0 * (c_proposed - c_cpp) / c_cpp)
}
