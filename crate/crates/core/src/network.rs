//! Aggregation of per-window edge sets into weighted bias networks.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use crate::dataset::{CountryId, Dataset};
use crate::detector::{detect_window, DetectConfig, EdgeKind, Skip, WindowReport};
use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::nullmodel::WindowSpec;
use crate::regions::{Region, RegionRegistry};
use crate::{FIRST_YEAR, LAST_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    /// Count reciprocated edges only.
    CollusionOnly,
    /// Count reciprocated edges and unreciprocated one-way edges.
    OneWayAndCollusion,
}

/// Stepping sequence of non-overlapping windows.
///
/// Window `i` covers `start + i*size ..= start + (i+1)*size - 1`; there are
/// `(end - start) / size` of them and a trailing partial window is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AggregationSpec {
    start: u16,
    end: u16,
    window_size: u16,
    mode: AggregationMode,
}

impl AggregationSpec {
    pub fn new(start: i64, end: i64, window_size: i64, mode: AggregationMode) -> Result<Self> {
        for y in [start, end] {
            if !(i64::from(FIRST_YEAR)..=i64::from(LAST_YEAR)).contains(&y) {
                return Err(Error::UnsupportedYear(y));
            }
        }
        if window_size < 1 {
            return Err(Error::InvalidSpec(format!(
                "window size must be positive, got {window_size}"
            )));
        }
        if end - start < window_size {
            return Err(Error::InvalidSpec(format!(
                "{start}-{end} is shorter than one window of {window_size} years"
            )));
        }
        Ok(Self {
            start: start as u16,
            end: end as u16,
            window_size: window_size as u16,
            mode,
        })
    }

    pub fn start(&self) -> u16 {
        self.start
    }

    pub fn end(&self) -> u16 {
        self.end
    }

    pub fn window_size(&self) -> u16 {
        self.window_size
    }

    pub fn mode(&self) -> AggregationMode {
        self.mode
    }

    pub fn window_count(&self) -> usize {
        usize::from((self.end - self.start) / self.window_size)
    }

    pub fn windows(&self) -> Vec<WindowSpec> {
        (0..self.window_count() as u16)
            .map(|i| {
                let from = self.start + i * self.window_size;
                WindowSpec::new(i64::from(from), i64::from(from + self.window_size - 1))
                    .expect("windows lie inside the validated span")
            })
            .collect()
    }
}

/// Weighted network of significant edges over a stepping sequence of windows.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasNetwork {
    spec: AggregationSpec,
    windows: Vec<WindowSpec>,
    nodes: BTreeMap<CountryId, Region>,
    /// Keyed by the lexicographically ordered pair.
    collusive: BTreeMap<(CountryId, CountryId), u32>,
    one_way: BTreeMap<(CountryId, CountryId), u32>,
    skips: Vec<Skip>,
}

impl BiasNetwork {
    /// Folds per-window reports into occurrence counts.
    pub fn from_reports(
        spec: AggregationSpec,
        regions: &RegionRegistry,
        reports: &[WindowReport],
    ) -> Result<Self> {
        let mut collusive = BTreeMap::new();
        let mut one_way = BTreeMap::new();
        let mut skips = Vec::new();
        for report in reports {
            for e in &report.edges {
                match e.kind {
                    EdgeKind::Collusive if e.from < e.to => {
                        *collusive.entry((e.from.clone(), e.to.clone())).or_insert(0) += 1;
                    }
                    EdgeKind::Collusive => {}
                    EdgeKind::OneWay if spec.mode == AggregationMode::OneWayAndCollusion => {
                        *one_way.entry((e.from.clone(), e.to.clone())).or_insert(0) += 1;
                    }
                    EdgeKind::OneWay => {}
                }
            }
            skips.extend(report.skips.iter().cloned());
        }
        let mut network = Self {
            spec,
            windows: reports.iter().map(|r| r.window).collect(),
            nodes: BTreeMap::new(),
            collusive,
            one_way,
            skips,
        };
        network.rebuild_nodes(regions)?;
        Ok(network)
    }

    fn rebuild_nodes(&mut self, regions: &RegionRegistry) -> Result<()> {
        let mut nodes = BTreeMap::new();
        for (a, b) in self.collusive.keys().chain(self.one_way.keys()) {
            for c in [a, b] {
                let region = regions.get(c).ok_or_else(|| Error::UnknownCountry {
                    name: c.to_string(),
                    context: "region registry".into(),
                })?;
                nodes.insert(c.clone(), region);
            }
        }
        self.nodes = nodes;
        Ok(())
    }

    pub fn spec(&self) -> &AggregationSpec {
        &self.spec
    }

    pub fn windows(&self) -> &[WindowSpec] {
        &self.windows
    }

    pub fn nodes(&self) -> &BTreeMap<CountryId, Region> {
        &self.nodes
    }

    pub fn collusive(&self) -> &BTreeMap<(CountryId, CountryId), u32> {
        &self.collusive
    }

    pub fn one_way(&self) -> &BTreeMap<(CountryId, CountryId), u32> {
        &self.one_way
    }

    pub fn skips(&self) -> &[Skip] {
        &self.skips
    }

    /// Occurrence count of the collusive edge between `a` and `b`, in either order.
    pub fn collusion_count(&self, a: &CountryId, b: &CountryId) -> u32 {
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        self.collusive.get(&key).copied().unwrap_or(0)
    }

    pub fn one_way_count(&self, from: &CountryId, to: &CountryId) -> u32 {
        self.one_way
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// Joins two networks over adjacent spans with the same window size and mode.
    pub fn merge(&self, later: &BiasNetwork, regions: &RegionRegistry) -> Result<Self> {
        let (a, b) = (&self.spec, &later.spec);
        if a.end != b.start || a.window_size != b.window_size || a.mode != b.mode {
            return Err(Error::InvalidSpec(format!(
                "cannot merge {}-{} (size {}) with {}-{} (size {})",
                a.start, a.end, a.window_size, b.start, b.end, b.window_size
            )));
        }
        if (a.end - a.start) % a.window_size != 0 {
            return Err(Error::InvalidSpec(format!(
                "{}-{} leaves a partial window, so the merged windows would shift",
                a.start, a.end
            )));
        }
        let spec = AggregationSpec::new(
            i64::from(a.start),
            i64::from(b.end),
            i64::from(a.window_size),
            a.mode,
        )?;
        let mut merged = self.clone();
        merged.spec = spec;
        merged.windows.extend(later.windows.iter().copied());
        for (k, v) in &later.collusive {
            *merged.collusive.entry(k.clone()).or_insert(0) += v;
        }
        for (k, v) in &later.one_way {
            *merged.one_way.entry(k.clone()).or_insert(0) += v;
        }
        merged.skips.extend(later.skips.iter().cloned());
        merged.rebuild_nodes(regions)?;
        Ok(merged)
    }

    /// Rows `(from, to, kind, count)` sorted by `(from, to, kind)`.
    pub fn edge_rows(&self) -> Vec<(&CountryId, &CountryId, EdgeKind, u32)> {
        let mut rows: Vec<_> = self
            .collusive
            .iter()
            .map(|((a, b), &n)| (a, b, EdgeKind::Collusive, n))
            .chain(
                self.one_way
                    .iter()
                    .map(|((a, b), &n)| (a, b, EdgeKind::OneWay, n)),
            )
            .collect();
        rows.sort();
        rows
    }

    pub fn write_edges_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["from", "to", "kind", "count"])?;
        for (from, to, kind, count) in self.edge_rows() {
            wtr.write_record([from.as_str(), to.as_str(), kind.as_str(), &count.to_string()])?;
        }
        wtr.flush()
    }

    pub fn write_skips_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["window_start", "window_end", "giver", "receiver", "year", "reason"])?;
        for s in &self.skips {
            wtr.write_record([
                &s.window.start().to_string(),
                &s.window.end().to_string(),
                s.pair.giver.as_str(),
                s.pair.receiver.as_str(),
                &s.year.to_string(),
                s.reason.as_str(),
            ])?;
        }
        wtr.flush()
    }
}

/// Runs window detection over every stepping window and aggregates the counts.
pub fn aggregate(
    dataset: &Dataset,
    spec: &AggregationSpec,
    config: &DetectConfig,
) -> Result<BiasNetwork> {
    let reports = window_reports(dataset, spec, config)?;
    BiasNetwork::from_reports(*spec, dataset.regions(), &reports)
}

/// Per-window reports for every window of `spec`, in chronological order.
pub fn window_reports(
    dataset: &Dataset,
    spec: &AggregationSpec,
    config: &DetectConfig,
) -> Result<Vec<WindowReport>> {
    let windows = spec.windows();
    map_collect(config.execution, &windows, |w| detect_window(dataset, w, config))
        .into_iter()
        .collect()
}

/// Collusive-to-one-way weight ratio of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Reciprocity {
    Ratio(f64),
    /// Collusive edges but no one-way edges.
    Infinite,
    /// No edges at all.
    Undefined,
}

impl fmt::Display for Reciprocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reciprocity::Ratio(r) => write!(f, "{r}"),
            Reciprocity::Infinite => f.write_str("inf"),
            Reciprocity::Undefined => f.write_str("undefined"),
        }
    }
}

/// Occurrence-weighted collusive pairs divided by occurrence-weighted one-way
/// edges, per network.
pub fn reciprocity_ratio(networks: &[BiasNetwork]) -> Result<Vec<Reciprocity>> {
    networks
        .iter()
        .map(|n| {
            if n.spec.mode != AggregationMode::OneWayAndCollusion {
                return Err(Error::WrongMode);
            }
            let collusive: u32 = n.collusive.values().sum();
            let one_way: u32 = n.one_way.values().sum();
            Ok(match (collusive, one_way) {
                (0, 0) => Reciprocity::Undefined,
                (_, 0) => Reciprocity::Infinite,
                (c, o) => Reciprocity::Ratio(f64::from(c) / f64::from(o)),
            })
        })
        .collect()
}
