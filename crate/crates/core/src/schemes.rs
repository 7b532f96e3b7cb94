//! Voting schemes used in each contest year and their unbiased samplers.
//!
//! Three families cover 1957–2017:
//!
//! * **Allocated** – a fixed descending list of scores, each given to a distinct
//!   country. Under the null the receiver's rank among the candidates is uniform.
//! * **Sequential** – a list of point values, each awarded independently to a
//!   uniformly chosen candidate, so one receiver may collect several of them.
//! * **Rated** – every receiver gets the sum of independent juror scores drawn
//!   uniformly from a list, regardless of how many countries take part.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::ScorePmf;

pub const SCORES_1962: [u32; 3] = [3, 2, 1];
pub const SCORES_1963: [u32; 5] = [5, 4, 3, 2, 1];
pub const SCORES_1964: [u32; 3] = [5, 3, 1];
pub const SCORES_1971: [u32; 5] = [5, 4, 3, 2, 1];
pub const SCORES_1975: [u32; 10] = [12, 10, 8, 7, 6, 5, 4, 3, 2, 1];
pub const TEN_SINGLE_POINTS: [u32; 10] = [1; 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeFamily {
    Allocated,
    Sequential,
    Rated,
}

impl fmt::Display for SchemeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeFamily::Allocated => "allocated",
            SchemeFamily::Sequential => "sequential",
            SchemeFamily::Rated => "rated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum VotingScheme {
    /// Strictly descending scores, each given to a distinct candidate.
    Allocated { scores: Vec<u32> },
    /// Point values, each independently placed on one candidate.
    Sequential { points: Vec<u32> },
    /// Sum of `jurors` independent uniform draws from `juror_scores`.
    Rated { juror_scores: Vec<u32>, jurors: u32 },
}

impl VotingScheme {
    pub fn allocated(scores: impl Into<Vec<u32>>) -> Result<Self> {
        let scores = scores.into();
        if scores.is_empty() || scores.contains(&0) {
            return Err(Error::InvalidScheme(
                "allocated scores must be a non-empty list of positive integers".into(),
            ));
        }
        if scores.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidScheme(format!(
                "allocated scores must be strictly descending: {scores:?}"
            )));
        }
        Ok(VotingScheme::Allocated { scores })
    }

    pub fn sequential(points: impl Into<Vec<u32>>) -> Result<Self> {
        let points = points.into();
        if points.is_empty() || points.contains(&0) {
            return Err(Error::InvalidScheme(
                "sequential points must be a non-empty list of positive integers".into(),
            ));
        }
        Ok(VotingScheme::Sequential { points })
    }

    pub fn rated(juror_scores: impl Into<Vec<u32>>, jurors: u32) -> Result<Self> {
        let juror_scores = juror_scores.into();
        if juror_scores.is_empty() || juror_scores.contains(&0) || jurors == 0 {
            return Err(Error::InvalidScheme(
                "rated schemes need positive juror scores and at least one juror".into(),
            ));
        }
        Ok(VotingScheme::Rated {
            juror_scores,
            jurors,
        })
    }

    /// The scheme in force for a contest year.
    pub fn for_year(year: i64) -> Result<Self> {
        let scheme = match year {
            1957..=1961 | 1967..=1970 | 1974 => VotingScheme::Sequential {
                points: TEN_SINGLE_POINTS.to_vec(),
            },
            1962 => VotingScheme::Allocated {
                scores: SCORES_1962.to_vec(),
            },
            1963 => VotingScheme::Allocated {
                scores: SCORES_1963.to_vec(),
            },
            1964..=1966 => VotingScheme::Sequential {
                points: SCORES_1964.to_vec(),
            },
            1971..=1973 => VotingScheme::Rated {
                juror_scores: SCORES_1971.to_vec(),
                jurors: 2,
            },
            1975..=2017 => VotingScheme::Allocated {
                scores: SCORES_1975.to_vec(),
            },
            _ => return Err(Error::UnsupportedYear(year)),
        };
        Ok(scheme)
    }

    pub fn family(&self) -> SchemeFamily {
        match self {
            VotingScheme::Allocated { .. } => SchemeFamily::Allocated,
            VotingScheme::Sequential { .. } => SchemeFamily::Sequential,
            VotingScheme::Rated { .. } => SchemeFamily::Rated,
        }
    }

    /// Largest score a single receiver can get from one giver in one year.
    pub fn max_score(&self) -> u32 {
        match self {
            VotingScheme::Allocated { scores } => scores[0],
            VotingScheme::Sequential { points } => points.iter().sum(),
            VotingScheme::Rated {
                juror_scores,
                jurors,
            } => juror_scores.iter().max().copied().unwrap_or(0) * jurors,
        }
    }

    /// Every score one giver can award one receiver.
    pub fn attainable_scores(&self) -> BTreeSet<u32> {
        match self {
            VotingScheme::Allocated { scores } => {
                std::iter::once(0).chain(scores.iter().copied()).collect()
            }
            VotingScheme::Sequential { points } => {
                let mut sums = BTreeSet::from([0]);
                for &p in points {
                    let shifted: Vec<u32> = sums.iter().map(|s| s + p).collect();
                    sums.extend(shifted);
                }
                sums
            }
            VotingScheme::Rated {
                juror_scores,
                jurors,
            } => {
                let mut sums = BTreeSet::from([0]);
                for _ in 0..*jurors {
                    sums = sums
                        .iter()
                        .flat_map(|s| juror_scores.iter().map(move |x| s + x))
                        .collect();
                }
                sums
            }
        }
    }

    /// Whether the scores one giver awarded to all of its receivers in a year
    /// form a ballot the scheme can produce.
    ///
    /// Allocated scores may each be used at most once. Sequential points must
    /// split into disjoint groups, one group per receiver. Rated ballots only
    /// need every cell to be attainable.
    pub fn is_valid_ballot(&self, cells: &[u32]) -> bool {
        let attainable = self.attainable_scores();
        if cells.iter().any(|c| !attainable.contains(c)) {
            return false;
        }
        match self {
            VotingScheme::Allocated { .. } => {
                let mut seen = HashSet::new();
                cells.iter().filter(|&&c| c > 0).all(|c| seen.insert(*c))
            }
            VotingScheme::Sequential { points } => {
                let awarded: Vec<u32> = cells.iter().copied().filter(|&c| c > 0).collect();
                partitions_into(points, &awarded)
            }
            VotingScheme::Rated { .. } => true,
        }
    }

    /// One unbiased draw of the score a giver awards a fixed receiver when
    /// `candidates` countries are eligible to receive.
    pub fn sample<R: Rng + ?Sized>(&self, candidates: u32, rng: &mut R) -> Result<u32> {
        if candidates == 0 {
            return Err(Error::InvalidCandidateCount(0));
        }
        Ok(self.sample_unchecked(candidates, rng))
    }

    #[inline]
    pub(crate) fn sample_unchecked<R: Rng + ?Sized>(&self, candidates: u32, rng: &mut R) -> u32 {
        match self {
            VotingScheme::Allocated { scores } => {
                let position = rng.gen_range(1..=candidates) as usize;
                if position <= scores.len() {
                    scores[position - 1]
                } else {
                    0
                }
            }
            VotingScheme::Sequential { points } => points
                .iter()
                .filter(|_| rng.gen_range(1..=candidates) == 1)
                .sum(),
            VotingScheme::Rated {
                juror_scores,
                jurors,
            } => (0..*jurors)
                .map(|_| juror_scores[rng.gen_range(0..juror_scores.len())])
                .sum(),
        }
    }

    /// Exact distribution of [`VotingScheme::sample`].
    pub fn exact_pmf(&self, candidates: u32) -> Result<ScorePmf> {
        if candidates == 0 {
            return Err(Error::InvalidCandidateCount(0));
        }
        let c = f64::from(candidates);
        let dense = match self {
            VotingScheme::Allocated { scores } => {
                let mut dense = vec![0.0; scores[0] as usize + 1];
                let reachable = scores.len().min(candidates as usize);
                for &s in &scores[..reachable] {
                    dense[s as usize] += 1.0 / c;
                }
                dense[0] += (candidates as usize - reachable) as f64 / c;
                dense
            }
            VotingScheme::Sequential { points } => {
                let hit = 1.0 / c;
                let mut dense = vec![1.0];
                for &p in points {
                    let p = p as usize;
                    let mut next = vec![0.0; dense.len() + p];
                    for (total, &prob) in dense.iter().enumerate() {
                        next[total] += prob * (1.0 - hit);
                        next[total + p] += prob * hit;
                    }
                    dense = next;
                }
                dense
            }
            VotingScheme::Rated {
                juror_scores,
                jurors,
            } => {
                let max = *juror_scores.iter().max().unwrap() as usize;
                let mut single = vec![0.0; max + 1];
                for &s in juror_scores {
                    single[s as usize] += 1.0 / juror_scores.len() as f64;
                }
                let single = ScorePmf::from_dense(&single);
                let draws = vec![single; *jurors as usize];
                return crate::pmf::convolve_years(&draws);
            }
        };
        Ok(ScorePmf::from_dense(&dense))
    }
}

impl fmt::Display for VotingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VotingScheme::Allocated { scores } => write!(f, "allocated{scores:?}"),
            VotingScheme::Sequential { points } => write!(f, "sequential{points:?}"),
            VotingScheme::Rated {
                juror_scores,
                jurors,
            } => write!(f, "rated{juror_scores:?}x{jurors}"),
        }
    }
}

/// Can each awarded total be matched to its own disjoint sub-multiset of `points`?
fn partitions_into(points: &[u32], awarded: &[u32]) -> bool {
    let total: u32 = points.iter().sum();
    if awarded.iter().sum::<u32>() > total {
        return false;
    }
    if points.iter().all(|&p| p == points[0]) {
        // identical points: any totals that are multiples of the unit fit
        return awarded.iter().all(|a| a % points[0] == 0);
    }
    if points.len() > 20 {
        // FIXME: exact check is exponential in the number of distinct points
        return true;
    }

    fn search(
        points: &[u32],
        awarded: &[u32],
        idx: usize,
        free: u32,
        dead: &mut HashSet<(usize, u32)>,
    ) -> bool {
        if idx == awarded.len() {
            return true;
        }
        if dead.contains(&(idx, free)) {
            return false;
        }
        let mut sub = free;
        while sub != 0 {
            let sum: u32 = (0..points.len())
                .filter(|i| sub & (1 << i) != 0)
                .map(|i| points[i])
                .sum();
            if sum == awarded[idx] && search(points, awarded, idx + 1, free & !sub, dead) {
                return true;
            }
            sub = (sub - 1) & free;
        }
        dead.insert((idx, free));
        false
    }

    let all = if points.len() == 32 { u32::MAX } else { (1u32 << points.len()) - 1 };
    search(points, awarded, 0, all, &mut HashSet::new())
}

/// The voting scheme in force for `year`.
pub fn scheme_for_year(year: i64) -> Result<VotingScheme> {
    VotingScheme::for_year(year)
}

/// Free-function form of [`VotingScheme::sample`].
pub fn sample_score<R: Rng + ?Sized>(
    scheme: &VotingScheme,
    candidates: u32,
    rng: &mut R,
) -> Result<u32> {
    scheme.sample(candidates, rng)
}

/// Free-function form of [`VotingScheme::exact_pmf`].
pub fn exact_null_pmf(scheme: &VotingScheme, candidates: u32) -> Result<ScorePmf> {
    scheme.exact_pmf(candidates)
}
