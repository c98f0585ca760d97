//! Channel model: the shared phase-shift set, link budgets, random
//! realizations, and the per-element candidate vectors.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexVec, ANGLE_EPS};

/// Version tag written into every realization document.
pub const SCHEMA_VERSION: u32 = 1;

/// The `K` candidate phase shifts available to every element, strictly
/// increasing inside `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhaseShiftSet {
    phases: Vec<f64>,
}

impl PhaseShiftSet {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidPhaseSet(
                "at least one phase is required".into(),
            ));
        }
        for (i, &p) in phases.iter().enumerate() {
            if !p.is_finite() || !(0.0..TAU).contains(&p) {
                return Err(Error::InvalidPhaseSet(format!(
                    "phase {i} = {p} is outside [0, 2pi)"
                )));
            }
        }
        if let Some(i) = phases.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPhaseSet(format!(
                "phases must be strictly increasing (index {})",
                i + 1
            )));
        }
        Ok(PhaseShiftSet { phases })
    }

    /// `k` evenly spaced phases starting at 0.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i as f64 * TAU / k as f64).collect())
    }

    /// Phases `0, g1, g1 + g2, ...` built from consecutive gaps. The closing
    /// gap back to the first phase is implied.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        let mut phases = Vec::with_capacity(gaps.len() + 1);
        let mut acc = 0.0;
        phases.push(acc);
        for &g in gaps {
            acc += g;
            phases.push(acc);
        }
        Self::new(phases)
    }

    /// Parses a comma-separated list such as `pi/6,5pi/6` or `0,2.0944`.
    pub fn parse(list: &str) -> Result<Self> {
        let phases = list
            .split(',')
            .map(|tok| parse_angle(tok.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(phases)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phase(&self, i: usize) -> f64 {
        self.phases[i]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Counterclockwise gap from phase `i` to the next one, wrapping from
    /// the last phase back to the first (`φ_1 + 2π − φ_K`).
    pub fn gap(&self, i: usize) -> f64 {
        let k = self.phases.len();
        if i + 1 < k {
            self.phases[i + 1] - self.phases[i]
        } else {
            self.phases[0] + TAU - self.phases[k - 1]
        }
    }

    pub fn gaps(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.gap(i)).collect()
    }

    /// Number of separation lines per element: `K + 1` when one gap exceeds
    /// π (it hosts an OFF sector), otherwise `K`.
    pub fn lines_per_element(&self) -> usize {
        let wide = self.gaps().iter().filter(|&&g| g > PI + ANGLE_EPS).count();
        self.len() + wide
    }
}

impl TryFrom<Vec<f64>> for PhaseShiftSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PhaseShiftSet::new(v)
    }
}

impl From<PhaseShiftSet> for Vec<f64> {
    fn from(s: PhaseShiftSet) -> Vec<f64> {
        s.phases
    }
}

fn parse_angle(tok: &str) -> Result<f64> {
    let bad = || Error::InvalidPhaseSet(format!("cannot parse phase `{tok}`"));
    let lower = tok.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return lower.parse::<f64>().map_err(|_| bad());
    };
    let coef = lower[..pos].trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = lower[pos + 2..].trim();
    let den = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?
    };
    Ok(coef * PI / den)
}

/// Link budget in dB. All dB values are power gains; amplitudes are
/// `10^(dB/20)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub gain_tx_ris_db: f64,
    pub gain_ris_rx_db: f64,
    pub gain_direct_db: f64,
    /// `P / (B N0)` in dB.
    pub snr_budget_db: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
}

fn default_bandwidth() -> f64 {
    1.0
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            gain_tx_ris_db: -80.0,
            gain_ris_rx_db: -60.0,
            gain_direct_db: -140.0,
            snr_budget_db: 100.0,
            bandwidth_hz: 1.0,
        }
    }
}

pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gain_tx_ris_db", self.gain_tx_ris_db),
            ("gain_ris_rx_db", self.gain_ris_rx_db),
            ("gain_direct_db", self.gain_direct_db),
            ("snr_budget_db", self.snr_budget_db),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidBudget(format!("{name} must be finite")));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidBudget("bandwidth_hz must be positive".into()));
        }
        Ok(())
    }

    /// `|v_n| = |h'_n| |h''_n|`.
    pub fn element_amplitude(&self) -> f64 {
        db_to_amplitude(self.gain_tx_ris_db + self.gain_ris_rx_db)
    }

    pub fn direct_amplitude(&self) -> f64 {
        db_to_amplitude(self.gain_direct_db)
    }

    /// `P / (B N0)` as a linear factor.
    pub fn snr_budget_linear(&self) -> f64 {
        10f64.powf(self.snr_budget_db / 10.0)
    }
}

/// Decision for one element: switched off, or on with the phase at the
/// given zero-based index into the [`PhaseShiftSet`].
///
/// Serialized as an integer code: `0` for OFF, `i + 1` for `On(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "usize", into = "usize")]
pub enum ElementChoice {
    Off,
    On(usize),
}

impl ElementChoice {
    pub fn code(self) -> usize {
        match self {
            ElementChoice::Off => 0,
            ElementChoice::On(i) => i + 1,
        }
    }

    pub fn from_code(code: usize) -> Self {
        match code {
            0 => ElementChoice::Off,
            c => ElementChoice::On(c - 1),
        }
    }

    pub fn is_on(self) -> bool {
        matches!(self, ElementChoice::On(_))
    }
}

impl From<usize> for ElementChoice {
    fn from(code: usize) -> Self {
        ElementChoice::from_code(code)
    }
}

impl From<ElementChoice> for usize {
    fn from(c: ElementChoice) -> usize {
        c.code()
    }
}

impl fmt::Display for ElementChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementChoice::Off => write!(f, "OFF"),
            ElementChoice::On(i) => write!(f, "ON({})", i + 1),
        }
    }
}

/// Direct-path coefficient plus the concatenated coefficient of every
/// element. Every element has nonzero amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRealization {
    h_d: ComplexVec,
    v: Vec<ComplexVec>,
}

impl ChannelRealization {
    /// Rejects any element with zero amplitude.
    pub fn new(h_d: ComplexVec, v: Vec<ComplexVec>) -> Result<Self> {
        if let Some(index) = v.iter().position(|x| x.is_zero()) {
            return Err(Error::ZeroElement { index });
        }
        Ok(ChannelRealization { h_d, v })
    }

    /// Drops zero-amplitude elements and returns their original indices.
    pub fn dropping_zeros(h_d: ComplexVec, v: Vec<ComplexVec>) -> (Self, Vec<usize>) {
        let dropped = v
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_zero())
            .map(|(i, _)| i)
            .collect();
        let v = v.into_iter().filter(|x| !x.is_zero()).collect();
        (ChannelRealization { h_d, v }, dropped)
    }

    pub fn h_d(&self) -> ComplexVec {
        self.h_d
    }

    pub fn elements(&self) -> &[ComplexVec] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Keeps the first `n` elements.
    pub fn truncated(&self, n: usize) -> Self {
        ChannelRealization {
            h_d: self.h_d,
            v: self.v[..n.min(self.v.len())].to_vec(),
        }
    }

    pub fn with_direct(&self, h_d: ComplexVec) -> Self {
        ChannelRealization {
            h_d,
            v: self.v.clone(),
        }
    }
}

impl<'de> Deserialize<'de> for ChannelRealization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            h_d: ComplexVec,
            v: Vec<ComplexVec>,
        }
        let raw = Raw::deserialize(d)?;
        ChannelRealization::new(raw.h_d, raw.v).map_err(serde::de::Error::custom)
    }
}

/// On-disk form of a realization, optionally carrying its phase set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub realization: ChannelRealization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseShiftSet>,
}

impl RealizationDocument {
    pub fn new(realization: ChannelRealization, phases: Option<PhaseShiftSet>) -> Self {
        RealizationDocument {
            schema_version: SCHEMA_VERSION,
            realization,
            phases,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RealizationDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: doc.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("realization serializes")
    }
}

/// `F_{n,i}`: the element coefficient rotated by phase `i`.
pub fn f_vector(v_n: ComplexVec, set: &PhaseShiftSet, i: usize) -> Result<ComplexVec> {
    if i >= set.len() {
        return Err(Error::PhaseIndexOutOfRange {
            index: i,
            k: set.len(),
        });
    }
    Ok(v_n.rotate(set.phase(i)))
}

/// The contribution `g_n` of an element under a given choice.
///
/// Panics if an `On` index is out of range for `set`.
pub fn realize_g(v_n: ComplexVec, set: &PhaseShiftSet, choice: ElementChoice) -> ComplexVec {
    match choice {
        ElementChoice::Off => ComplexVec::ZERO,
        ElementChoice::On(i) => v_n.rotate(set.phase(i)),
    }
}

/// `h = h_d + Σ g_n`.
pub fn overall_h(
    real: &ChannelRealization,
    set: &PhaseShiftSet,
    cfg: &[ElementChoice],
) -> Result<ComplexVec> {
    if cfg.len() != real.len() {
        return Err(Error::LengthMismatch {
            expected: real.len(),
            got: cfg.len(),
        });
    }
    if let Some(&ElementChoice::On(index)) = cfg
        .iter()
        .find(|c| matches!(c, ElementChoice::On(i) if *i >= set.len()))
    {
        return Err(Error::PhaseIndexOutOfRange {
            index,
            k: set.len(),
        });
    }
    let mut h = real.h_d;
    for (&v, &c) in real.v.iter().zip(cfg) {
        h += realize_g(v, set, c);
    }
    Ok(h)
}

/// Independent random stream for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draws a realization with `n` elements: equal amplitudes from the budget,
/// element arguments i.i.d. uniform on `[0, 2π)`, direct path on the
/// positive real axis.
pub fn sample_with_rng<R: Rng + ?Sized>(
    budget: &LinkBudget,
    n: usize,
    rng: &mut R,
) -> ChannelRealization {
    let amp = budget.element_amplitude();
    let v = (0..n)
        .map(|_| ComplexVec::from_polar(amp, rng.gen::<f64>() * TAU))
        .collect();
    ChannelRealization {
        h_d: ComplexVec::new(budget.direct_amplitude(), 0.0),
        v,
    }
}

pub fn sample_realization(budget: &LinkBudget, n: usize, rng_seed: u64) -> ChannelRealization {
    sample_trial(budget, n, rng_seed, 0)
}

pub fn sample_trial(
    budget: &LinkBudget,
    n: usize,
    master_seed: u64,
    trial: u64,
) -> ChannelRealization {
    sample_with_rng(budget, n, &mut trial_rng(master_seed, trial))
}
