//! Significance testing of observed window means against the null thresholds.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use crate::dataset::{CountryId, Dataset};
use crate::error::Result;
use crate::exec::{map_collect, Execution};
use crate::nullmodel::{check_eligible, compute_threshold, window_mean, NullConfig, Pair, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    OneWay,
    Collusive,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::OneWay => "one-way",
            EdgeKind::Collusive => "collusive",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservedMean {
    pub pair: Pair,
    pub window: WindowSpec,
    pub mean: f64,
    pub years_used: usize,
}

/// Directed edge whose observed window mean strictly exceeds its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasEdge {
    pub from: CountryId,
    pub to: CountryId,
    pub window: WindowSpec,
    pub observed: f64,
    pub threshold: f64,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub null: NullConfig,
    /// Divide alpha by the number of pairs tested in each window.
    #[serde(default)]
    pub bonferroni: bool,
    #[serde(default)]
    pub execution: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    GiverAbsent,
    ReceiverAbsent,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::GiverAbsent => "giver-absent",
            SkipReason::ReceiverAbsent => "receiver-absent",
        }
    }
}

/// A pair left out of a window because one side missed a year.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Skip {
    pub window: WindowSpec,
    pub pair: Pair,
    /// First window year in which the pair was not eligible.
    pub year: u16,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub window: WindowSpec,
    /// Sorted by `(from, to)`.
    pub edges: Vec<BiasEdge>,
    pub skips: Vec<Skip>,
    pub pairs_tested: usize,
    /// Alpha actually applied to each pair.
    pub alpha: f64,
}

impl WindowReport {
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["from", "to", "observed", "threshold", "kind"])?;
        for e in &self.edges {
            wtr.write_record([
                e.from.as_str(),
                e.to.as_str(),
                &e.observed.to_string(),
                &e.threshold.to_string(),
                e.kind.as_str(),
            ])?;
        }
        wtr.flush()
    }
}

/// Average points `pair.giver` awarded `pair.receiver` per window year.
pub fn observed_mean(dataset: &Dataset, pair: &Pair, window: &WindowSpec) -> Result<ObservedMean> {
    let mut total = 0;
    for year in window.years() {
        let rec = dataset.year(year)?;
        check_eligible(rec, pair)?;
        total += rec
            .score(&pair.giver, &pair.receiver)
            .expect("eligible pairs always have a cell");
    }
    Ok(ObservedMean {
        pair: pair.clone(),
        window: *window,
        mean: window_mean(total, window.len()),
        years_used: window.len(),
    })
}

/// Tests one ordered pair. The returned edge is provisionally one-way;
/// [`detect_window`] upgrades reciprocated edges.
pub fn detect_pair(
    dataset: &Dataset,
    pair: &Pair,
    window: &WindowSpec,
    config: &DetectConfig,
) -> Result<Option<BiasEdge>> {
    test_pair(dataset, pair, window, &config.null)
}

fn test_pair(
    dataset: &Dataset,
    pair: &Pair,
    window: &WindowSpec,
    null: &NullConfig,
) -> Result<Option<BiasEdge>> {
    let observed = observed_mean(dataset, pair, window)?;
    let threshold = compute_threshold(dataset, pair, window, null)?;
    Ok((observed.mean > threshold.threshold).then(|| BiasEdge {
        from: pair.giver.clone(),
        to: pair.receiver.clone(),
        window: *window,
        observed: observed.mean,
        threshold: threshold.threshold,
        kind: EdgeKind::OneWay,
    }))
}

/// Splits every ordered pair of countries active in the window into eligible
/// pairs and skips.
pub fn eligible_pairs(dataset: &Dataset, window: &WindowSpec) -> Result<(Vec<Pair>, Vec<Skip>)> {
    let records = window
        .years()
        .map(|y| dataset.year(y))
        .collect::<Result<Vec<_>>>()?;
    let countries: BTreeSet<&CountryId> = records
        .iter()
        .flat_map(|r| r.givers().iter().chain(r.receivers()))
        .collect();

    let mut pairs = Vec::new();
    let mut skips = Vec::new();
    for &giver in &countries {
        for &receiver in &countries {
            if giver == receiver {
                continue;
            }
            let pair = Pair::new(giver.clone(), receiver.clone());
            let missing = records.iter().find_map(|r| {
                if !r.givers().contains(giver) {
                    Some((r.year(), SkipReason::GiverAbsent))
                } else if !r.receivers().contains(receiver) {
                    Some((r.year(), SkipReason::ReceiverAbsent))
                } else {
                    None
                }
            });
            match missing {
                None => pairs.push(pair),
                Some((year, reason)) => skips.push(Skip {
                    window: *window,
                    pair,
                    year,
                    reason,
                }),
            }
        }
    }
    Ok((pairs, skips))
}

/// Tests every eligible ordered pair in the window and marks reciprocated
/// edges as collusive.
pub fn detect_window(
    dataset: &Dataset,
    window: &WindowSpec,
    config: &DetectConfig,
) -> Result<WindowReport> {
    config.null.validate()?;
    let (pairs, skips) = eligible_pairs(dataset, window)?;

    let mut null = config.null.clone();
    if config.bonferroni && !pairs.is_empty() {
        null.alpha /= pairs.len() as f64;
    }

    let results = map_collect(config.execution, &pairs, |pair| {
        test_pair(dataset, pair, window, &null)
    });
    let mut edges: Vec<BiasEdge> = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let present: HashSet<(CountryId, CountryId)> = edges
        .iter()
        .map(|e| (e.from.clone(), e.to.clone()))
        .collect();
    for e in &mut edges {
        if present.contains(&(e.to.clone(), e.from.clone())) {
            e.kind = EdgeKind::Collusive;
        }
    }
    edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));

    Ok(WindowReport {
        window: *window,
        edges,
        skips,
        pairs_tested: pairs.len(),
        alpha: null.alpha,
    })
}
