//! Reference solvers: exhaustive enumeration, closest point projection, and
//! the continuous-phase upper bound.

use super::{choice_for_direction, config_given_direction, SweepResult};
use crate::channel::{overall_h, realize_g, ChannelRealization, ElementChoice, PhaseShiftSet};
use crate::error::{Error, Result};
use crate::geometry::{angular_distance, ComplexVec};

/// Largest number of configurations [`exhaustive_optimize`] will enumerate.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1 << 24;

pub fn exhaustive_optimize(real: &ChannelRealization, set: &PhaseShiftSet) -> Result<SweepResult> {
    exhaustive_optimize_with_cap(real, set, DEFAULT_EXHAUSTIVE_CAP)
}

/// Enumerates all `(K+1)^N` configurations and keeps the one with the largest
/// `|h|`; ties go to the lexicographically smallest configuration (OFF before
/// `On(0)` before `On(1)`, first element most significant).
pub fn exhaustive_optimize_with_cap(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    cap: u64,
) -> Result<SweepResult> {
    let n = real.len();
    let radix = set.len() + 1;
    let needed = (radix as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::CapExceeded { needed, cap });
    }

    // candidates[j][c] is element j's contribution under choice code c
    let candidates: Vec<Vec<ComplexVec>> = real
        .elements()
        .iter()
        .map(|&v| {
            (0..radix)
                .map(|c| realize_g(v, set, ElementChoice::from_code(c)))
                .collect()
        })
        .collect();

    // prefix[d] = h_d + Σ_{j<d} g_j, so prefix[n] is the channel
    let mut digits = vec![0usize; n];
    let mut prefix = vec![real.h_d(); n + 1];
    for d in 0..n {
        prefix[d + 1] = prefix[d] + candidates[d][0];
    }
    let mut best_digits = digits.clone();
    let mut best = prefix[n].norm_sqr();

    loop {
        // odometer increment, last element least significant
        let mut d = n;
        loop {
            if d == 0 {
                let config = best_digits
                    .iter()
                    .map(|&c| ElementChoice::from_code(c))
                    .collect::<Vec<_>>();
                let h_star = overall_h(real, set, &config)?;
                return Ok(SweepResult {
                    config,
                    h_star,
                    sector_index: None,
                    candidates: None,
                });
            }
            d -= 1;
            digits[d] += 1;
            if digits[d] < radix {
                break;
            }
            digits[d] = 0;
        }
        for j in d..n {
            prefix[j + 1] = prefix[j] + candidates[j][digits[j]];
        }
        let amp = prefix[n].norm_sqr();
        if amp > best {
            best = amp;
            best_digits.copy_from_slice(&digits);
        }
    }
}

/// Variant of closest point projection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CppMode {
    /// Elements whose closest candidate is more than a right angle away from
    /// the direct path are switched off.
    #[default]
    OffEnabled,
    /// Every element takes its closest candidate.
    AlwaysOn,
}

/// Aligns every element as closely as possible with the direct path.
pub fn cpp_optimize(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    mode: CppMode,
) -> Result<SweepResult> {
    let target = real
        .h_d()
        .arg_mod_2pi()
        .map_err(|_| Error::ZeroDirectPath)?;
    let config = match mode {
        CppMode::OffEnabled => config_given_direction(real, set, target),
        CppMode::AlwaysOn => real
            .elements()
            .iter()
            .map(|&v| closest_phase(v, set, target))
            .collect(),
    };
    let h_star = overall_h(real, set, &config)?;
    Ok(SweepResult {
        config,
        h_star,
        sector_index: None,
        candidates: None,
    })
}

fn closest_phase(v: ComplexVec, set: &PhaseShiftSet, theta: f64) -> ElementChoice {
    match choice_for_direction(v, set, theta) {
        on @ ElementChoice::On(_) => on,
        ElementChoice::Off => {
            let base = v.arg_mod_2pi().expect("realization elements are nonzero");
            let (best, _) =
                set.phases()
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |(bi, ba), (i, &p)| {
                        let a = angular_distance(base + p, theta);
                        if a < ba {
                            (i, a)
                        } else {
                            (bi, ba)
                        }
                    });
            ElementChoice::On(best)
        }
    }
}

/// `|h_d| + Σ|v_n|`: every path perfectly aligned with continuous phases.
pub fn continuous_upper_bound(real: &ChannelRealization) -> f64 {
    real.h_d().amplitude() + real.elements().iter().map(|v| v.amplitude()).sum::<f64>()
}
