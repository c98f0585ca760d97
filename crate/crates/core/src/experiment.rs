//! Seeded Monte Carlo scenarios: sample realizations along an x-axis, run the
//! requested solvers on each, and aggregate into CSV rows.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{empty_regions, measured_empty_ratio, regions_csv, HStarSource};
use crate::channel::{sample_trial, ChannelRealization, LinkBudget, PhaseShiftSet};
use crate::error::{Error, Result};
use crate::exec::{map_trials, Execution};
use crate::geometry::ComplexVec;
use crate::metrics::{capacity, performance_gain};
use crate::optimizer::{
    continuous_upper_bound, cpp_optimize, exhaustive_optimize_with_cap, sweep_optimize, CppMode,
    DEFAULT_EXHAUSTIVE_CAP,
};

/// Trial count used by `--fast` runs.
pub const FAST_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Sweep,
    Cpp,
    CppAlwaysOn,
    Exhaustive,
    ContinuousUb,
}

impl Solver {
    pub const ALL: [Solver; 5] = [
        Solver::Sweep,
        Solver::Cpp,
        Solver::CppAlwaysOn,
        Solver::Exhaustive,
        Solver::ContinuousUb,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Solver::Sweep => "sweep",
            Solver::Cpp => "cpp",
            Solver::CppAlwaysOn => "cpp_always_on",
            Solver::Exhaustive => "exhaustive",
            Solver::ContinuousUb => "continuous_ub",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSpec {
    Explicit { phases: PhaseShiftSet },
    Uniform { k: usize },
}

impl PhaseSpec {
    pub fn resolve(&self) -> Result<PhaseShiftSet> {
        match self {
            PhaseSpec::Explicit { phases } => Ok(phases.clone()),
            PhaseSpec::Uniform { k } => PhaseShiftSet::uniform(*k),
        }
    }
}

/// The swept parameter. Phase-gap axes replace the scenario's phase set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Axis {
    /// A single point; `x` is the element count.
    #[default]
    None,
    Elements {
        values: Vec<usize>,
    },
    DirectGainDb {
        values: Vec<f64>,
    },
    SnrBudgetDb {
        values: Vec<f64>,
    },
    /// Two phases `{0, g}`.
    PhaseGap {
        values: Vec<f64>,
    },
    /// Three phases `{0, g1, g1 + g2}`; `x = g1`, `y = g2`.
    PhaseGapPair {
        values: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub budget: LinkBudget,
    pub n_elements: usize,
    pub phases: PhaseSpec,
    pub trials: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    #[serde(default)]
    pub axis: Axis,
    /// Adds the mean measured empty ratio (requires the sweep solver).
    #[serde(default)]
    pub empty_ratio: bool,
    #[serde(default)]
    pub h_star_source: HStarSource,
    /// Exhaustive search only runs at points with at most this many elements.
    #[serde(default)]
    pub exhaustive_max_elements: Option<usize>,
    #[serde(default = "default_cap")]
    pub exhaustive_cap: u64,
    /// Emits the empty regions of the first trial at the first point.
    #[serde(default)]
    pub region_dump: bool,
}

fn default_cap() -> u64 {
    DEFAULT_EXHAUSTIVE_CAP
}

/// One x-axis point, fully resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub x: f64,
    pub y: Option<f64>,
    pub budget: LinkBudget,
    pub n_elements: usize,
    pub set: PhaseShiftSet,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn fast(self) -> Self {
        let trials = self.trials.min(FAST_TRIALS);
        self.with_trials(trials)
    }

    fn runs(&self, solver: Solver) -> bool {
        self.solvers.contains(&solver)
    }

    fn exhaustive_at(&self, n: usize) -> bool {
        self.runs(Solver::Exhaustive) && self.exhaustive_max_elements.is_none_or(|m| n <= m)
    }

    /// Solvers in canonical column order, without duplicates.
    pub fn solver_columns(&self) -> Vec<Solver> {
        Solver::ALL.into_iter().filter(|&s| self.runs(s)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.name.is_empty() {
            return bad("name must not be empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.empty_ratio && !self.runs(Solver::Sweep) {
            return bad("empty_ratio requires the sweep solver".into());
        }
        self.budget.validate()?;
        let points = self.points()?;
        for p in &points {
            if self.exhaustive_at(p.n_elements) {
                let needed = ((p.set.len() + 1) as u128)
                    .checked_pow(p.n_elements as u32)
                    .unwrap_or(u128::MAX);
                if needed > self.exhaustive_cap as u128 {
                    return Err(Error::CapExceeded {
                        needed,
                        cap: self.exhaustive_cap,
                    });
                }
            }
        }
        Ok(())
    }

    /// Resolves every x-axis point.
    pub fn points(&self) -> Result<Vec<ScenarioPoint>> {
        let base = ScenarioPoint {
            x: self.n_elements as f64,
            y: None,
            budget: self.budget,
            n_elements: self.n_elements,
            set: self.phases.resolve()?,
        };
        let empty = || Error::InvalidScenario("axis has no values".into());
        let points: Vec<ScenarioPoint> = match &self.axis {
            Axis::None => vec![base],
            Axis::Elements { values } => values
                .iter()
                .map(|&n| ScenarioPoint {
                    x: n as f64,
                    n_elements: n,
                    ..base.clone()
                })
                .collect(),
            Axis::DirectGainDb { values } => values
                .iter()
                .map(|&db| ScenarioPoint {
                    x: db,
                    budget: LinkBudget {
                        gain_direct_db: db,
                        ..self.budget
                    },
                    ..base.clone()
                })
                .collect(),
            Axis::SnrBudgetDb { values } => values
                .iter()
                .map(|&db| ScenarioPoint {
                    x: db,
                    budget: LinkBudget {
                        snr_budget_db: db,
                        ..self.budget
                    },
                    ..base.clone()
                })
                .collect(),
            Axis::PhaseGap { values } => values
                .iter()
                .map(|&g| {
                    if !(g > 0.0 && g < TAU) {
                        return Err(Error::InvalidScenario(format!(
                            "phase gap {g} is outside (0, 2pi)"
                        )));
                    }
                    Ok(ScenarioPoint {
                        x: g,
                        set: PhaseShiftSet::from_gaps(&[g])?,
                        ..base.clone()
                    })
                })
                .collect::<Result<_>>()?,
            Axis::PhaseGapPair { values } => values
                .iter()
                .map(|&(g1, g2)| {
                    if !(g1 > 0.0 && g2 > 0.0 && g1 + g2 < TAU) {
                        return Err(Error::InvalidScenario(format!(
                            "phase gaps ({g1}, {g2}) must be positive with sum below 2pi"
                        )));
                    }
                    Ok(ScenarioPoint {
                        x: g1,
                        y: Some(g2),
                        set: PhaseShiftSet::from_gaps(&[g1, g2])?,
                        ..base.clone()
                    })
                })
                .collect::<Result<_>>()?,
        };
        if points.is_empty() {
            return Err(empty());
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverStats {
    pub solver: Solver,
    /// Mean spectral efficiency over trials, bits/s/Hz.
    pub mean_se: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub x: f64,
    pub y: Option<f64>,
    /// One entry per solver that ran at this point.
    pub stats: Vec<SolverStats>,
    /// Gain of the mean sweep capacity over the mean CPP capacity.
    pub gain_pct: Option<f64>,
    pub empty_ratio: Option<f64>,
}

impl ResultRow {
    pub fn solver(&self, solver: Solver) -> Option<&SolverStats> {
        self.stats.iter().find(|s| s.solver == solver)
    }
}

struct TrialOutcome {
    se: [Option<f64>; 5],
    empty_ratio: Option<f64>,
}

fn solver_slot(s: Solver) -> usize {
    Solver::ALL.iter().position(|&x| x == s).expect("listed")
}

fn run_trial(s: &Scenario, p: &ScenarioPoint, real: &ChannelRealization) -> Result<TrialOutcome> {
    let mut se = [None; 5];
    let mut sweep_amp = None;
    for solver in s.solver_columns() {
        let h = match solver {
            Solver::Sweep => {
                let r = sweep_optimize(real, &p.set);
                sweep_amp = Some(r.amplitude());
                r.h_star
            }
            Solver::Cpp => cpp_optimize(real, &p.set, CppMode::OffEnabled)?.h_star,
            Solver::CppAlwaysOn => cpp_optimize(real, &p.set, CppMode::AlwaysOn)?.h_star,
            Solver::Exhaustive if s.exhaustive_at(p.n_elements) => {
                exhaustive_optimize_with_cap(real, &p.set, s.exhaustive_cap)?.h_star
            }
            Solver::Exhaustive => continue,
            Solver::ContinuousUb => ComplexVec::new(continuous_upper_bound(real), 0.0),
        };
        se[solver_slot(solver)] = Some(capacity(h, &p.budget).spectral_efficiency);
    }
    let empty_ratio = if s.empty_ratio {
        let amp = match s.h_star_source {
            HStarSource::Sweep => sweep_amp.expect("validated: sweep runs"),
            HStarSource::ContinuousBound => continuous_upper_bound(real),
        };
        Some(measured_empty_ratio(&empty_regions(real, &p.set, amp)?).measured_ratio)
    } else {
        None
    };
    Ok(TrialOutcome { se, empty_ratio })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_scenario(s: &Scenario) -> Result<Vec<ResultRow>> {
    run_scenario_with(s, Execution::default())
}

/// Runs every point of `s`. Trial `t` at every point draws from the same
/// random stream, so points share realizations where their shapes agree.
pub fn run_scenario_with(s: &Scenario, exec: Execution) -> Result<Vec<ResultRow>> {
    s.validate()?;
    let mut rows = Vec::new();
    for p in s.points()? {
        let outcomes = map_trials(s.trials, exec, |t| {
            let real = sample_trial(&p.budget, p.n_elements, s.seed, t as u64);
            run_trial(s, &p, &real)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        let mut stats = Vec::new();
        for solver in s.solver_columns() {
            let values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.se[solver_slot(solver)])
                .collect();
            if values.is_empty() {
                continue;
            }
            let (mean_se, std_se) = mean_std(&values);
            stats.push(SolverStats {
                solver,
                mean_se,
                std_se,
            });
        }
        let mean_of = |solver| {
            stats
                .iter()
                .find(|st: &&SolverStats| st.solver == solver)
                .map(|st| st.mean_se)
        };
        let gain_pct = match (mean_of(Solver::Sweep), mean_of(Solver::Cpp)) {
            (Some(a), Some(b)) => Some(performance_gain(a, b)?),
            _ => None,
        };
        let empty_ratio = s.empty_ratio.then(|| {
            let v: Vec<f64> = outcomes.iter().filter_map(|o| o.empty_ratio).collect();
            mean_std(&v).0
        });
        rows.push(ResultRow {
            x: p.x,
            y: p.y,
            stats,
            gain_pct,
            empty_ratio,
        });
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with a header row. Columns: `x`, `y` (two-dimensional axes only),
/// `mean_se_<solver>` and `std_se_<solver>` per solver, `gain_pct` (when
/// both sweep and CPP ran), `empty_ratio` (when requested).
pub fn to_csv(s: &Scenario, rows: &[ResultRow]) -> String {
    let two_d = matches!(s.axis, Axis::PhaseGapPair { .. });
    let solvers = s.solver_columns();
    let with_gain = s.runs(Solver::Sweep) && s.runs(Solver::Cpp);

    let mut header = vec!["x".to_string()];
    if two_d {
        header.push("y".into());
    }
    for solver in &solvers {
        header.push(format!("mean_se_{}", solver.key()));
        header.push(format!("std_se_{}", solver.key()));
    }
    if with_gain {
        header.push("gain_pct".into());
    }
    if s.empty_ratio {
        header.push("empty_ratio".into());
    }

    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut cells = vec![row.x.to_string()];
        if two_d {
            cells.push(opt(row.y));
        }
        for &solver in &solvers {
            let st = row.solver(solver);
            cells.push(opt(st.map(|s| s.mean_se)));
            cells.push(opt(st.map(|s| s.std_se)));
        }
        if with_gain {
            cells.push(opt(row.gain_pct));
        }
        if s.empty_ratio {
            cells.push(opt(row.empty_ratio));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Region CSV for the first trial at the first point, if requested.
pub fn region_dump(s: &Scenario) -> Result<Option<String>> {
    if !s.region_dump {
        return Ok(None);
    }
    let p = s.points()?.swap_remove(0);
    let real = sample_trial(&p.budget, p.n_elements, s.seed, 0);
    let amp = match s.h_star_source {
        HStarSource::Sweep => sweep_optimize(&real, &p.set).amplitude(),
        HStarSource::ContinuousBound => continuous_upper_bound(&real),
    };
    Ok(Some(regions_csv(&empty_regions(&real, &p.set, amp)?)))
}

pub const DEFAULT_SEED: u64 = 2023;
const DEFAULT_TRIALS: usize = 1000;

fn default_set() -> PhaseSpec {
    PhaseSpec::Explicit {
        phases: PhaseShiftSet::new(vec![PI / 6.0, 5.0 * PI / 6.0]).expect("valid"),
    }
}

fn preset(name: &str, solvers: &[Solver], axis: Axis) -> Scenario {
    Scenario {
        name: name.into(),
        budget: LinkBudget::default(),
        n_elements: 50,
        phases: default_set(),
        trials: DEFAULT_TRIALS,
        seed: DEFAULT_SEED,
        solvers: solvers.to_vec(),
        axis,
        empty_ratio: false,
        h_star_source: HStarSource::Sweep,
        exhaustive_max_elements: None,
        exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        region_dump: false,
    }
}

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|i| from + i as f64 * step).collect()
}

/// Desk-scale presets for every figure of the simulation study.
pub fn builtin_scenarios() -> Vec<Scenario> {
    use Solver::*;

    let mut fig9 = preset(
        "fig9",
        &[Sweep, Cpp, Exhaustive, ContinuousUb],
        Axis::Elements {
            values: vec![1, 2, 3, 4, 5, 6, 7, 8, 10, 20, 30, 40, 50],
        },
    );
    fig9.exhaustive_max_elements = Some(8);

    let fig10 = preset(
        "fig10",
        &[Sweep, Cpp],
        Axis::DirectGainDb {
            values: steps(-140.0, -100.0, 5.0),
        },
    );
    let fig11 = preset(
        "fig11",
        &[Sweep, Cpp],
        Axis::SnrBudgetDb {
            values: steps(100.0, 130.0, 2.0),
        },
    );
    let fig12 = preset(
        "fig12",
        &[Sweep, Cpp],
        Axis::PhaseGap {
            values: (1..24).map(|k| k as f64 * TAU / 24.0).collect(),
        },
    );
    let step = TAU / 18.0;
    let fig13 = preset(
        "fig13",
        &[Sweep, Cpp],
        Axis::PhaseGapPair {
            values: (1..18)
                .flat_map(|i| (1..18 - i).map(move |j| (i as f64 * step, j as f64 * step)))
                .collect(),
        },
    );

    let mut fig14 = preset("fig14", &[Sweep, Cpp], Axis::None);
    fig14.trials = 1;
    fig14.empty_ratio = true;
    fig14.region_dump = true;

    let fig15 = |k: usize| {
        let mut s = preset(
            &format!("fig15-k{k}"),
            &[Sweep],
            Axis::Elements {
                values: vec![10, 20, 50, 100, 200],
            },
        );
        s.phases = PhaseSpec::Uniform { k };
        s.empty_ratio = true;
        s
    };

    vec![fig9, fig10, fig11, fig12, fig13, fig14, fig15(2), fig15(3)]
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(axis: Axis, solvers: &[Solver]) -> Scenario {
        let mut s = preset("tiny", solvers, axis);
        s.n_elements = 6;
        s.trials = 20;
        s
    }

    #[test]
    fn presets_validate() {
        let all = builtin_scenarios();
        let names: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            ["fig9", "fig10", "fig11", "fig12", "fig13", "fig14", "fig15-k2", "fig15-k3"]
        );
        for s in &all {
            s.validate().unwrap();
        }
        assert!(matches!(
            builtin_scenario("fig99"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn fig13_grid_contains_uniform_point() {
        let s = builtin_scenario("fig13").unwrap();
        let pts = s.points().unwrap();
        assert_eq!(pts.len(), 136);
        assert!(pts
            .iter()
            .any(|p| (p.x - TAU / 3.0).abs() < 1e-12 && (p.y.unwrap() - TAU / 3.0).abs() < 1e-12));
    }

    #[test]
    fn validation_failures() {
        let mut s = tiny(Axis::None, &[Solver::Sweep]);
        s.trials = 0;
        assert!(s.validate().is_err());

        let s = tiny(Axis::PhaseGap { values: vec![TAU] }, &[Solver::Sweep]);
        assert!(s.validate().is_err());

        let s = tiny(Axis::Elements { values: vec![30] }, &[Solver::Exhaustive]);
        assert!(matches!(s.validate(), Err(Error::CapExceeded { .. })));

        let mut s = tiny(Axis::None, &[Solver::Cpp]);
        s.empty_ratio = true;
        assert!(s.validate().is_err());

        let s = tiny(Axis::Elements { values: vec![] }, &[Solver::Sweep]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn scenario_json_round_trip() {
        for s in builtin_scenarios() {
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        }
        let text = r#"{"name": "x", "n_elements": 4, "phases": {"kind": "uniform", "k": 2},
                       "trials": 3, "seed": 1, "solvers": ["sweep", "cpp"]}"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.axis, Axis::None);
        assert_eq!(s.budget, LinkBudget::default());
    }

    #[test]
    fn sweep_matches_exhaustive_in_rows() {
        let s = tiny(
            Axis::Elements {
                values: vec![1, 3, 6],
            },
            &[
                Solver::Sweep,
                Solver::Cpp,
                Solver::Exhaustive,
                Solver::ContinuousUb,
            ],
        );
        let rows = run_scenario(&s).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            let sweep = r.solver(Solver::Sweep).unwrap().mean_se;
            let ex = r.solver(Solver::Exhaustive).unwrap().mean_se;
            assert!((sweep - ex).abs() <= 1e-12 * ex.max(1.0));
            assert!(r.solver(Solver::ContinuousUb).unwrap().mean_se >= sweep);
            assert!(r.gain_pct.unwrap() >= -1e-9);
        }
    }

    #[test]
    fn exhaustive_skipped_above_limit() {
        let mut s = tiny(
            Axis::Elements {
                values: vec![2, 40],
            },
            &[Solver::Sweep, Solver::Exhaustive],
        );
        s.exhaustive_max_elements = Some(8);
        let rows = run_scenario(&s).unwrap();
        assert!(rows[0].solver(Solver::Exhaustive).is_some());
        assert!(rows[1].solver(Solver::Exhaustive).is_none());
        let csv = to_csv(&s, &rows);
        let last = csv.lines().last().unwrap();
        assert!(last.ends_with(",,"));
    }

    #[test]
    fn csv_is_deterministic_across_execution() {
        let mut s = tiny(
            Axis::SnrBudgetDb {
                values: vec![100.0, 110.0],
            },
            &[Solver::Sweep, Solver::Cpp],
        );
        s.empty_ratio = true;
        let a = to_csv(&s, &run_scenario_with(&s, Execution::Sequential).unwrap());
        let b = to_csv(&s, &run_scenario_with(&s, Execution::Parallel).unwrap());
        assert_eq!(a, b);
        assert_eq!(
            a.lines().next().unwrap(),
            "x,mean_se_sweep,std_se_sweep,mean_se_cpp,std_se_cpp,gain_pct,empty_ratio"
        );
        assert_eq!(a.lines().count(), 3);
    }

    #[test]
    fn two_dimensional_csv_has_y() {
        let s = tiny(
            Axis::PhaseGapPair {
                values: vec![(1.0, 2.0)],
            },
            &[Solver::Sweep],
        );
        let csv = to_csv(&s, &run_scenario(&s).unwrap());
        assert!(csv.starts_with("x,y,mean_se_sweep,std_se_sweep\n1,2,"));
    }

    #[test]
    fn fig14_dump_has_150_lines() {
        let s = builtin_scenario("fig14").unwrap();
        let dump = region_dump(&s).unwrap().unwrap();
        assert_eq!(dump.lines().count(), 151);
        assert!(region_dump(&builtin_scenario("fig10").unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn fast_caps_trials() {
        let s = builtin_scenario("fig11").unwrap().fast();
        assert_eq!(s.trials, FAST_TRIALS);
        assert_eq!(builtin_scenario("fig14").unwrap().fast().trials, 1);
    }

    #[test]
    fn mean_and_sample_std() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
