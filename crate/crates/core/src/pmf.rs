//! Exact discrete score distributions.

use crate::error::{Error, Result};

/// Probabilities below this are treated as zero mass when comparing tails.
const TAIL_EPS: f64 = 1e-12;

/// Probability mass function over non-negative integer scores.
///
/// The support is sorted ascending and holds no zero-probability entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePmf {
    support: Vec<u32>,
    probs: Vec<f64>,
}

impl ScorePmf {
    /// Builds a pmf from a dense vector indexed by score.
    pub fn from_dense(dense: &[f64]) -> Self {
        let (support, probs) = dense
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(s, &p)| (s as u32, p))
            .unzip();
        Self { support, probs }
    }

    /// Builds a pmf from `(score, probability)` pairs. Duplicate scores are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut dense = Vec::new();
        for (s, p) in pairs {
            let s = s as usize;
            if dense.len() <= s {
                dense.resize(s + 1, 0.0);
            }
            dense[s] += p;
        }
        Self::from_dense(&dense)
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn prob(&self, score: u32) -> f64 {
        match self.support.binary_search(&score) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    pub fn max_score(&self) -> u32 {
        self.support.last().copied().unwrap_or(0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(s, p)| f64::from(s) * p).sum()
    }

    /// P(X >= score)
    pub fn tail_at_least(&self, score: u32) -> f64 {
        self.iter().filter(|(s, _)| *s >= score).map(|(_, p)| p).sum()
    }

    /// P(X > score)
    pub fn tail_above(&self, score: u32) -> f64 {
        self.iter().filter(|(s, _)| *s > score).map(|(_, p)| p).sum()
    }

    /// Largest score `t` with P(X >= t) >= alpha.
    ///
    /// This is the population version of "minimum of the top alpha fraction of
    /// samples", which is how Monte Carlo thresholds are read off.
    pub fn upper_quantile(&self, alpha: f64) -> Result<u32> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let mut tail = 0.0;
        for (s, p) in self.iter().collect::<Vec<_>>().into_iter().rev() {
            tail += p;
            if tail >= alpha - TAIL_EPS {
                return Ok(s);
            }
        }
        self.support.first().copied().ok_or(Error::EmptyInput)
    }

    fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.max_score() as usize + 1];
        for (s, p) in self.iter() {
            dense[s as usize] = p;
        }
        dense
    }
}

/// Exact distribution of the sum of independent per-year scores.
pub fn convolve_years(pmfs: &[ScorePmf]) -> Result<ScorePmf> {
    let (first, rest) = pmfs.split_first().ok_or(Error::EmptyInput)?;
    let mut acc = first.to_dense();
    for pmf in rest {
        let mut next = vec![0.0; acc.len() + pmf.max_score() as usize];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (s, p) in pmf.iter() {
                next[i + s as usize] += a * p;
            }
        }
        acc = next;
    }
    Ok(ScorePmf::from_dense(&acc))
}
