//! Monte Carlo null distribution of window-averaged scores and the
//! upper-tail significance threshold derived from it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{CountryId, Dataset};
use crate::error::{Error, Result};
use crate::pmf::{convolve_years, ScorePmf};
use crate::schemes::VotingScheme;
use crate::seed::{rng_from_seed, SeedBuilder, DEFAULT_SEED};
use crate::{FIRST_YEAR, LAST_YEAR};

pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Hard cap on the number of samples drawn in adaptive mode.
pub const ADAPTIVE_MAX_SAMPLES: usize = 1_000_000;
/// Samples added per adaptive step.
pub const ADAPTIVE_BLOCK: usize = 100;
/// Adaptive sampling stops once the threshold moves by less than this.
pub const ADAPTIVE_TOLERANCE: f64 = 1e-3;

/// Inclusive run of contest years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    start: u16,
    end: u16,
}

impl WindowSpec {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        for y in [start, end] {
            if !(i64::from(FIRST_YEAR)..=i64::from(LAST_YEAR)).contains(&y) {
                return Err(Error::UnsupportedYear(y));
            }
        }
        if start > end {
            return Err(Error::InvalidWindow { start, end });
        }
        Ok(Self {
            start: start as u16,
            end: end as u16,
        })
    }

    pub fn start(&self) -> u16 {
        self.start
    }

    pub fn end(&self) -> u16 {
        self.end
    }

    pub fn len(&self) -> usize {
        usize::from(self.end - self.start) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn years(&self) -> RangeInclusive<u16> {
        self.start..=self.end
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Ordered giver → receiver pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub giver: CountryId,
    pub receiver: CountryId,
}

impl Pair {
    pub fn new(giver: impl Into<CountryId>, receiver: impl Into<CountryId>) -> Self {
        Self {
            giver: giver.into(),
            receiver: receiver.into(),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            giver: self.receiver.clone(),
            receiver: self.giver.clone(),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.giver, self.receiver)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullConfig {
    pub sample_size: usize,
    /// Master seed; every pair-window derives its own child seed from it.
    pub seed: u64,
    pub alpha: f64,
    pub adaptive: bool,
    pub max_samples: usize,
    /// Per-year candidate counts that replace the ones read from the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_override: Option<BTreeMap<u16, u32>>,
}

impl Default for NullConfig {
    fn default() -> Self {
        Self {
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
            adaptive: false,
            max_samples: ADAPTIVE_MAX_SAMPLES,
            candidate_override: None,
        }
    }
}

impl NullConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidSampleSize(0));
        }
        if self.max_samples < self.sample_size {
            return Err(Error::InvalidSampleSize(self.max_samples));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }
}

/// Upper-tail cutoff on the window-mean score for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullThreshold {
    pub pair: Pair,
    pub window: WindowSpec,
    pub threshold: f64,
    pub sample_size: usize,
    /// Seed actually used for this pair-window.
    pub seed: u64,
    pub alpha: f64,
}

/// The scheme and candidate count used to draw one year of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct YearDraw {
    pub year: u16,
    pub scheme: VotingScheme,
    pub candidates: u32,
}

/// Sequence of per-year draws whose average is one null sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NullPlan {
    draws: Vec<YearDraw>,
}

impl NullPlan {
    pub fn new(draws: Vec<YearDraw>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(d) = draws.iter().find(|d| d.candidates == 0) {
            return Err(Error::InvalidCandidateCount(i64::from(d.candidates)));
        }
        Ok(Self { draws })
    }

    /// Builds the plan for `pair` over `window`, checking that the giver gives
    /// and the receiver receives in every window year.
    pub fn for_pair(
        dataset: &Dataset,
        pair: &Pair,
        window: &WindowSpec,
        candidate_override: Option<&BTreeMap<u16, u32>>,
    ) -> Result<Self> {
        let mut draws = Vec::with_capacity(window.len());
        for year in window.years() {
            let rec = dataset.year(year)?;
            check_eligible(rec, pair)?;
            let candidates = candidate_override
                .and_then(|o| o.get(&year).copied())
                .unwrap_or_else(|| rec.candidate_count(&pair.giver));
            draws.push(YearDraw {
                year,
                scheme: rec.scheme(),
                candidates,
            });
        }
        Self::new(draws)
    }

    pub fn draws(&self) -> &[YearDraw] {
        &self.draws
    }

    pub fn years(&self) -> usize {
        self.draws.len()
    }

    pub fn sample_total<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.draws
            .iter()
            .map(|d| d.scheme.sample_unchecked(d.candidates, rng))
            .sum()
    }

    pub fn sample_mean<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        window_mean(self.sample_total(rng), self.draws.len())
    }

    pub fn extend_means<R: Rng + ?Sized>(&self, out: &mut Vec<f64>, count: usize, rng: &mut R) {
        out.reserve(count);
        for _ in 0..count {
            out.push(self.sample_mean(rng));
        }
    }

    /// Largest window mean the plan can produce.
    pub fn max_mean(&self) -> f64 {
        let total: u32 = self.draws.iter().map(|d| d.scheme.max_score()).sum();
        window_mean(total, self.draws.len())
    }

    /// Exact distribution of the window total.
    pub fn exact_total_pmf(&self) -> Result<ScorePmf> {
        let pmfs = self
            .draws
            .iter()
            .map(|d| d.scheme.exact_pmf(d.candidates))
            .collect::<Result<Vec<_>>>()?;
        convolve_years(&pmfs)
    }

    /// Draws samples with an RNG seeded from `seed` and reads off the threshold.
    /// Returns the threshold and the number of samples used.
    pub fn threshold(&self, config: &NullConfig, seed: u64) -> Result<(f64, usize)> {
        config.validate()?;
        let mut rng = rng_from_seed(seed);
        let mut means = Vec::new();
        self.extend_means(&mut means, config.sample_size, &mut rng);
        let mut threshold = threshold_from_samples(&means, config.alpha)?;
        if config.adaptive {
            while means.len() < config.max_samples {
                let block = ADAPTIVE_BLOCK.min(config.max_samples - means.len());
                self.extend_means(&mut means, block, &mut rng);
                let next = threshold_from_samples(&means, config.alpha)?;
                let delta = (next - threshold).abs();
                threshold = next;
                if delta < ADAPTIVE_TOLERANCE {
                    break;
                }
            }
        }
        Ok((threshold, means.len()))
    }
}

/// Mean over a window, computed the same way for observed and sampled totals
/// so that ties compare exactly.
pub(crate) fn window_mean(total: u32, years: usize) -> f64 {
    f64::from(total) / years as f64
}

pub(crate) fn check_eligible(rec: &crate::dataset::YearRecord, pair: &Pair) -> Result<()> {
    if pair.giver == pair.receiver
        || !rec.givers().contains(&pair.giver)
        || !rec.receivers().contains(&pair.receiver)
    {
        return Err(Error::IneligiblePair {
            giver: pair.giver.to_string(),
            receiver: pair.receiver.to_string(),
            year: rec.year(),
        });
    }
    Ok(())
}

/// Child seed for one pair-window, independent of scheduling order.
pub fn pair_window_seed(master: u64, pair: &Pair, window: &WindowSpec) -> u64 {
    SeedBuilder::new(master)
        .str(pair.giver.as_str())
        .str(pair.receiver.as_str())
        .u64(u64::from(window.start))
        .u64(u64::from(window.end))
        .finish()
}

/// `sample_size` independent null window means for `pair`, drawn with an RNG
/// seeded directly from `seed`.
pub fn sample_window_means(
    dataset: &Dataset,
    pair: &Pair,
    window: &WindowSpec,
    sample_size: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if sample_size == 0 {
        return Err(Error::InvalidSampleSize(0));
    }
    let plan = NullPlan::for_pair(dataset, pair, window, None)?;
    let mut rng = rng_from_seed(seed);
    let mut means = Vec::new();
    plan.extend_means(&mut means, sample_size, &mut rng);
    Ok(means)
}

/// Minimum of the top `ceil(n * alpha)` samples, i.e. the empirical
/// `1 - alpha` upper cutoff.
pub fn threshold_from_samples(means: &[f64], alpha: f64) -> Result<f64> {
    if means.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    // the epsilon keeps e.g. 10_000 * 0.05 from rounding up to 501
    let k = ((means.len() as f64 * alpha) - 1e-9).ceil().max(1.0) as usize;
    let k = k.min(means.len());
    let mut scratch = means.to_vec();
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    Ok(*kth)
}

pub fn compute_threshold(
    dataset: &Dataset,
    pair: &Pair,
    window: &WindowSpec,
    config: &NullConfig,
) -> Result<NullThreshold> {
    config.validate()?;
    let plan = NullPlan::for_pair(dataset, pair, window, config.candidate_override.as_ref())?;
    let seed = pair_window_seed(config.seed, pair, window);
    let (threshold, sample_size) = plan.threshold(config, seed)?;
    Ok(NullThreshold {
        pair: pair.clone(),
        window: *window,
        threshold,
        sample_size,
        seed,
        alpha: config.alpha,
    })
}
