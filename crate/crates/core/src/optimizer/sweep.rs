//! The linear-complexity sector sweep.

use std::f64::consts::TAU;

use serde::Serialize;

use super::lines::{separation_lines, sort_separation_lines, update_h, SeparationLine};
use super::{config_given_direction, SweepResult};
use crate::channel::{overall_h, realize_g, ChannelRealization, ElementChoice, PhaseShiftSet};
use crate::error::{Error, Result};
use crate::geometry::wrap_angle;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Recompute `h` from scratch every `⌈N/4⌉` crossings and fail on drift
    /// above 1e-9 relative.
    pub verify: bool,
    /// Keep every sector's `|h|` in [`SweepResult::candidates`].
    pub keep_candidates: bool,
}

/// Work counters for one sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SweepStats {
    /// Vector additions in the candidate chain (`N` for the probe sector,
    /// two per crossing).
    pub vector_additions: u64,
    pub rotation_comparisons: u64,
    pub heap_comparisons: u64,
    /// Number of separation lines, `N·L`.
    pub lines: usize,
    /// Sectors whose candidate `|h|` was recorded.
    pub candidates_evaluated: usize,
    /// Distance between the channel after a full revolution and the probe
    /// channel, relative to `|h_d| + Σ|v_n|`.
    pub closure_error: f64,
}

const DRIFT_TOL: f64 = 1e-9;

/// Globally optimal configuration.
pub fn sweep_optimize(real: &ChannelRealization, set: &PhaseShiftSet) -> SweepResult {
    sweep_optimize_with(real, set, SweepOptions::default())
        .expect("sweep without verification cannot fail")
        .0
}

/// Sweep with options and work counters.
///
/// Elements are first ordered by `∠v_n` (ties by input order), which is the
/// only super-linear step. The walk starts in the widest sector, whose
/// configuration comes from [`config_given_direction`] at its midpoint; every
/// later sector is reached by one subtraction and one addition.
pub fn sweep_optimize_with(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    opts: SweepOptions,
) -> Result<(SweepResult, SweepStats)> {
    let n = real.len();
    let mut stats = SweepStats::default();
    if n == 0 {
        let result = SweepResult {
            config: Vec::new(),
            h_star: real.h_d(),
            sector_index: None,
            candidates: opts.keep_candidates.then(Vec::new),
        };
        return Ok((result, stats));
    }

    let args: Vec<f64> = real
        .elements()
        .iter()
        .map(|v| v.arg_mod_2pi().expect("realization elements are nonzero"))
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| args[a].total_cmp(&args[b]).then(a.cmp(&b)));
    let sorted = ChannelRealization::new(
        real.h_d(),
        perm.iter().map(|&i| real.elements()[i]).collect(),
    )?;

    let matrix = separation_lines(&sorted, set);
    let (lines, sort_stats) = sort_separation_lines(&matrix)?;
    stats.rotation_comparisons = sort_stats.rotation_comparisons;
    stats.heap_comparisons = sort_stats.heap_comparisons;
    let m = lines.len();
    stats.lines = m;

    // sector j spans from line j-1 to line j (sector 0 wraps past 2π)
    let width = |j: usize| -> f64 {
        if j == 0 {
            lines[0].argument + TAU - lines[m - 1].argument
        } else {
            lines[j].argument - lines[j - 1].argument
        }
    };
    let mut start = 0;
    let mut widest = width(0);
    for j in 1..m {
        let w = width(j);
        if w > widest {
            widest = w;
            start = j;
        }
    }
    let prev = if start == 0 { m - 1 } else { start - 1 };
    let probe = wrap_angle(lines[prev].argument + widest / 2.0);
    let probe_cfg = config_given_direction(&sorted, set, probe);

    let mut h = sorted.h_d();
    for (&v, &c) in sorted.elements().iter().zip(&probe_cfg) {
        h += realize_g(v, set, c);
    }
    stats.vector_additions += n as u64;
    let h_initial = h;
    let scale = real.h_d().amplitude() + continuous_sum(&sorted);

    let mut candidates: Vec<Option<f64>> = vec![None; m];
    candidates[start] = Some(h.amplitude());
    stats.candidates_evaluated = 1;

    let mut tracked = opts.verify.then(|| probe_cfg.clone());
    let check_every = n.div_ceil(4).max(1);

    for step in 0..m {
        let j = (start + step) % m;
        let line = &lines[j];
        h = update_h(h, line, &sorted, set);
        stats.vector_additions += 2;

        if let Some(cfg) = tracked.as_mut() {
            debug_assert_eq!(cfg[line.element], line.starting);
            cfg[line.element] = line.ending;
            if (step + 1) % check_every == 0 {
                let exact = overall_h(&sorted, set, cfg)?;
                let relative = (h - exact).amplitude() / scale.max(f64::MIN_POSITIVE);
                if relative > DRIFT_TOL {
                    return Err(Error::Drift {
                        relative,
                        crossings: step + 1,
                    });
                }
            }
        }

        let next = (j + 1) % m;
        if step + 1 < m && width(next) > 0.0 {
            candidates[next] = Some(h.amplitude());
            stats.candidates_evaluated += 1;
        }
    }
    stats.closure_error = (h - h_initial).amplitude() / scale.max(f64::MIN_POSITIVE);

    let mut best = start;
    let mut best_amp = f64::NEG_INFINITY;
    for (j, c) in candidates.iter().enumerate() {
        if let Some(a) = *c {
            if a > best_amp {
                best_amp = a;
                best = j;
            }
        }
    }

    let sorted_cfg = replay(&probe_cfg, &lines, start, best);
    let mut config = vec![ElementChoice::Off; n];
    for (row, &orig) in perm.iter().enumerate() {
        config[orig] = sorted_cfg[row];
    }
    let mut h_star = overall_h(real, set, &config)?;
    if h_star.amplitude() < real.h_d().amplitude() {
        config.fill(ElementChoice::Off);
        h_star = real.h_d();
    }

    let result = SweepResult {
        config,
        h_star,
        sector_index: Some(best),
        candidates: opts.keep_candidates.then_some(candidates),
    };
    Ok((result, stats))
}

/// Configuration of sector `target`, starting from the probe sector.
fn replay(
    probe_cfg: &[ElementChoice],
    lines: &[SeparationLine],
    start: usize,
    target: usize,
) -> Vec<ElementChoice> {
    let m = lines.len();
    let mut cfg = probe_cfg.to_vec();
    let crossings = (target + m - start) % m;
    for step in 0..crossings {
        let line = &lines[(start + step) % m];
        cfg[line.element] = line.ending;
    }
    cfg
}

fn continuous_sum(real: &ChannelRealization) -> f64 {
    real.elements().iter().map(|v| v.amplitude()).sum()
}
