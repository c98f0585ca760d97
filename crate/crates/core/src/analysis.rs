//! Empty regions: arcs around each separation line in which the argument of
//! the optimal channel cannot lie, and the fraction of the circle they cover.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;

use crate::channel::{ChannelRealization, PhaseShiftSet};
use crate::error::{Error, Result};
use crate::geometry::{angular_distance, wrap_angle};
use crate::optimizer::{continuous_upper_bound, separation_lines, sweep_optimize, SeparationLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// Line between two adjacent ON candidates.
    Adjacent,
    /// Line bordering an OFF sector.
    OffBoundary,
}

impl RegionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionKind::Adjacent => "adjacent",
            RegionKind::OffBoundary => "off_boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmptyRegion {
    pub line: SeparationLine,
    /// Half-width ω, in `[0, π/2]`.
    pub half_width: f64,
    pub kind: RegionKind,
}

impl EmptyRegion {
    pub fn center(&self) -> f64 {
        self.line.argument
    }

    /// `(start, end)` of the arc, both reduced into `[0, 2π)`.
    pub fn interval(&self) -> (f64, f64) {
        (
            wrap_angle(self.center() - self.half_width),
            wrap_angle(self.center() + self.half_width),
        )
    }

    /// Whether `theta` lies strictly inside the arc after shrinking it by
    /// `shrink` on both sides.
    pub fn contains(&self, theta: f64, shrink: f64) -> bool {
        angular_distance(theta, self.center()) < self.half_width - shrink
    }
}

fn clamped_arcsin(ratio: f64) -> f64 {
    ratio.clamp(0.0, 1.0).asin()
}

/// Half-width of the region around a line splitting two ON candidates whose
/// phases are `phi_i` and `phi_next`.
pub fn omega_small_gap(v_amp: f64, phi_i: f64, phi_next: f64, h_star_amp: f64) -> Result<f64> {
    if h_star_amp.is_nan() || h_star_amp <= 0.0 {
        return Err(Error::ZeroChannel);
    }
    let half_gap = (phi_next - phi_i) / 2.0;
    Ok(clamped_arcsin(v_amp * half_gap.sin().abs() / h_star_amp))
}

/// Half-width of the regions around both lines bordering an OFF sector.
pub fn omega_large_gap(v_amp: f64, h_star_amp: f64) -> Result<f64> {
    if h_star_amp.is_nan() || h_star_amp <= 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok(clamped_arcsin(v_amp / (2.0 * h_star_amp)))
}

/// One region per separation line, sized for an optimal channel of
/// amplitude `h_star_amp`.
pub fn empty_regions(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    h_star_amp: f64,
) -> Result<Vec<EmptyRegion>> {
    if h_star_amp.is_nan() || h_star_amp <= 0.0 {
        return Err(Error::ZeroChannel);
    }
    let matrix = separation_lines(real, set);
    matrix
        .lines()
        .iter()
        .map(|line| {
            let v_amp = real.elements()[line.element].amplitude();
            let (half_width, kind) = if line.borders_off() {
                (omega_large_gap(v_amp, h_star_amp)?, RegionKind::OffBoundary)
            } else {
                (
                    omega_small_gap(v_amp, 0.0, line.gap, h_star_amp)?,
                    RegionKind::Adjacent,
                )
            };
            debug_assert!(half_width <= FRAC_PI_2);
            Ok(EmptyRegion {
                line: *line,
                half_width,
                kind,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmptyRatioReport {
    /// Length of the union of all regions over 2π.
    pub measured_ratio: f64,
    /// Summed region widths over 2π, ignoring overlap.
    pub sum_ratio_ub: f64,
    /// `1 − measured / sum`, or 0 when there are no regions.
    pub overlap_fraction: f64,
}

/// Total length of the union of arcs `(center, half_width)` on the circle.
pub fn circle_union_length(arcs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut segs: Vec<(f64, f64)> = Vec::new();
    for (center, half) in arcs {
        if half <= 0.0 {
            continue;
        }
        if 2.0 * half >= TAU {
            return TAU;
        }
        let lo = wrap_angle(center - half);
        let hi = lo + 2.0 * half;
        if hi > TAU {
            segs.push((lo, TAU));
            segs.push((0.0, hi - TAU));
        } else {
            segs.push((lo, hi));
        }
    }
    segs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (lo, hi) in segs {
        current = match current {
            Some((cl, ch)) if lo <= ch => Some((cl, ch.max(hi))),
            Some((cl, ch)) => {
                total += ch - cl;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((cl, ch)) = current {
        total += ch - cl;
    }
    total.min(TAU)
}

pub fn measured_empty_ratio(regions: &[EmptyRegion]) -> EmptyRatioReport {
    let union = circle_union_length(regions.iter().map(|r| (r.center(), r.half_width)));
    let sum: f64 = regions.iter().map(|r| 2.0 * r.half_width).sum();
    let measured_ratio = union / TAU;
    let sum_ratio_ub = sum / TAU;
    let overlap_fraction = if sum > 0.0 { 1.0 - union / sum } else { 0.0 };
    EmptyRatioReport {
        measured_ratio,
        sum_ratio_ub,
        overlap_fraction,
    }
}

/// Large-`N` approximation of the summed-width ratio for `k` evenly spread
/// phases: `K sin(π/K) / π`.
pub fn empty_ratio_upper_bound_approx(k: usize) -> f64 {
    let k = k as f64;
    k * (PI / k).sin() / PI
}

/// Where the optimal amplitude used to size the regions comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HStarSource {
    /// The true optimum found by the sweep.
    #[default]
    Sweep,
    /// `|h_d| + Σ|v_n|`.
    ContinuousBound,
}

pub fn h_star_amplitude(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    source: HStarSource,
) -> f64 {
    match source {
        HStarSource::Sweep => sweep_optimize(real, set).amplitude(),
        HStarSource::ContinuousBound => continuous_upper_bound(real),
    }
}

/// Regions and coverage for one realization.
pub fn analyze(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    source: HStarSource,
) -> Result<(Vec<EmptyRegion>, EmptyRatioReport)> {
    let regions = empty_regions(real, set, h_star_amplitude(real, set, source))?;
    let report = measured_empty_ratio(&regions);
    Ok((regions, report))
}

/// `center_rad,half_width_rad,element,kind` with a header row.
pub fn regions_csv(regions: &[EmptyRegion]) -> String {
    let mut out = String::from("center_rad,half_width_rad,element,kind\n");
    for r in regions {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.center(),
            r.half_width,
            r.line.element,
            r.kind.as_str()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_realization;
    use crate::channel::LinkBudget;
    use crate::geometry::ComplexVec;
    use proptest::prelude::*;

    #[test]
    fn omega_small_examples() {
        assert_eq!(omega_small_gap(0.3, 1.0, 1.0, 1.0).unwrap(), 0.0);
        let w = omega_small_gap(0.1, 0.0, PI / 3.0, 1.0).unwrap();
        assert!((w - 0.05f64.asin()).abs() < 1e-15);
        assert!((w - 0.050020856805770016).abs() < 1e-12);
        let w = omega_small_gap(1.0, 0.0, PI, 1.0).unwrap();
        assert!((w - FRAC_PI_2).abs() < 1e-7);
        assert_eq!(omega_small_gap(1.0, 0.0, 1.0, 0.0), Err(Error::ZeroChannel));
    }

    #[test]
    fn omega_large_examples() {
        assert_eq!(omega_large_gap(0.0, 1.0).unwrap(), 0.0);
        assert!((omega_large_gap(1.0, 1.0).unwrap() - PI / 6.0).abs() < 1e-15);
        assert_eq!(omega_large_gap(2.0, 1.0).unwrap(), FRAC_PI_2);
        assert_eq!(omega_large_gap(5.0, 1.0).unwrap(), FRAC_PI_2);
        assert!(omega_large_gap(1.0, 0.0).is_err());
    }

    #[test]
    fn regions_for_one_element() {
        let set = PhaseShiftSet::new(vec![PI / 6.0, 5.0 * PI / 6.0]).unwrap();
        let real =
            ChannelRealization::new(ComplexVec::ZERO, vec![ComplexVec::new(1.0, 0.0)]).unwrap();
        let regions = empty_regions(&real, &set, 4.0).unwrap();
        let mut centers: Vec<f64> = regions.iter().map(|r| r.center()).collect();
        centers.sort_by(f64::total_cmp);
        for (c, want) in centers
            .iter()
            .zip([PI / 2.0, 4.0 * PI / 3.0, 5.0 * PI / 3.0])
        {
            assert!((c - want).abs() < 1e-12);
        }
        let adj = regions
            .iter()
            .find(|r| r.kind == RegionKind::Adjacent)
            .unwrap();
        assert!((adj.half_width - ((PI / 3.0).sin() / 4.0).asin()).abs() < 1e-12);
        for r in regions.iter().filter(|r| r.kind == RegionKind::OffBoundary) {
            assert!((r.half_width - (1.0f64 / 8.0).asin()).abs() < 1e-12);
        }
    }

    #[test]
    fn region_count_for_fifty_elements() {
        let set = PhaseShiftSet::new(vec![PI / 6.0, 5.0 * PI / 6.0]).unwrap();
        let real = sample_realization(&LinkBudget::default(), 50, 3);
        let (regions, _) = analyze(&real, &set, HStarSource::Sweep).unwrap();
        assert_eq!(regions.len(), 150);
    }

    #[test]
    fn huge_channel_shrinks_regions() {
        let set = PhaseShiftSet::uniform(3).unwrap();
        let real = sample_realization(&LinkBudget::default(), 10, 3);
        let regions = empty_regions(&real, &set, 1e30).unwrap();
        assert!(regions.iter().all(|r| r.half_width < 1e-20));
    }

    fn region_at(center: f64, half: f64) -> EmptyRegion {
        EmptyRegion {
            line: SeparationLine {
                argument: center,
                element: 0,
                column: 0,
                starting: crate::ElementChoice::Off,
                ending: crate::ElementChoice::On(0),
                gap: 0.0,
            },
            half_width: half,
            kind: RegionKind::OffBoundary,
        }
    }

    #[test]
    fn ratio_examples() {
        let r = measured_empty_ratio(&[]);
        assert_eq!(r.measured_ratio, 0.0);
        assert_eq!(r.overlap_fraction, 0.0);

        let r = measured_empty_ratio(&[region_at(1.0, 0.1), region_at(1.0, 0.1)]);
        assert!((r.measured_ratio * TAU - 0.2).abs() < 1e-12);
        assert!((r.sum_ratio_ub * TAU - 0.4).abs() < 1e-12);
        assert!((r.overlap_fraction - 0.5).abs() < 1e-12);

        // straddles zero
        let r = measured_empty_ratio(&[region_at(0.05, 0.1)]);
        assert!((r.measured_ratio * TAU - 0.2).abs() < 1e-12);
    }

    #[test]
    fn csv_rows() {
        let csv = regions_csv(&[region_at(1.0, 0.25)]);
        assert_eq!(
            csv,
            "center_rad,half_width_rad,element,kind\n1,0.25,0,off_boundary\n"
        );
    }

    #[test]
    fn bound_approximation_values() {
        assert!((empty_ratio_upper_bound_approx(2) - 2.0 / PI).abs() < 1e-15);
        assert!((empty_ratio_upper_bound_approx(3) - 0.8269933431326881).abs() < 1e-12);
        assert!((empty_ratio_upper_bound_approx(4) - 0.9003163161571061).abs() < 1e-12);
    }

    fn grid_coverage(arcs: &[(f64, f64)], points: usize) -> f64 {
        let hit = (0..points)
            .filter(|&i| {
                let t = (i as f64 + 0.5) * TAU / points as f64;
                arcs.iter().any(|&(c, w)| angular_distance(t, c) <= w)
            })
            .count();
        hit as f64 * TAU / points as f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn union_matches_dense_grid(arcs in proptest::collection::vec((0.0..TAU, 0.0..FRAC_PI_2), 0..40)) {
            let exact = circle_union_length(arcs.iter().copied());
            let grid = grid_coverage(&arcs, 100_000);
            prop_assert!((exact - grid).abs() / TAU < 1e-3);
        }

        #[test]
        fn measured_never_exceeds_sum(arcs in proptest::collection::vec((0.0..TAU, 0.0..FRAC_PI_2), 0..40)) {
            let regions: Vec<EmptyRegion> = arcs.iter().map(|&(c, w)| region_at(c, w)).collect();
            let r = measured_empty_ratio(&regions);
            prop_assert!(r.measured_ratio <= r.sum_ratio_ub + 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.measured_ratio));
        }
    }
}
