//! False-positive calibration on data drawn from the null model.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::detector::{detect_window, eligible_pairs, DetectConfig, EdgeKind};
use crate::error::{Error, Result};
use crate::network::{AggregationMode, AggregationSpec};
use crate::regions::RegionRegistry;
use crate::seed::SeedBuilder;
use crate::synthetic::{builtin_countries, null_dataset, SyntheticLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSetup {
    pub countries: usize,
    pub start: u16,
    pub end: u16,
    pub window_size: u16,
    /// Independent synthetic datasets to pool.
    pub replicates: usize,
    pub seed: u64,
    pub detect: DetectConfig,
}

impl Default for CalibrationSetup {
    fn default() -> Self {
        Self {
            countries: 25,
            start: 1975,
            end: 2015,
            window_size: 5,
            replicates: 2,
            seed: crate::seed::DEFAULT_SEED,
            detect: DetectConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// Ordered pair-windows tested.
    pub pair_windows: usize,
    /// Ordered pair-windows found significant.
    pub significant: usize,
    /// Unordered pair-windows where both directions were tested.
    pub unordered_pair_windows: usize,
    /// Unordered pair-windows found collusive.
    pub collusive: usize,
}

impl CalibrationReport {
    pub fn significance_rate(&self) -> f64 {
        self.significant as f64 / self.pair_windows.max(1) as f64
    }

    pub fn collusion_rate(&self) -> f64 {
        self.collusive as f64 / self.unordered_pair_windows.max(1) as f64
    }
}

/// Generates `replicates` null datasets and counts how often the detector
/// fires on them.
pub fn run_calibration(setup: &CalibrationSetup) -> Result<CalibrationReport> {
    check_countries(setup)?;
    let spec = AggregationSpec::new(
        i64::from(setup.start),
        i64::from(setup.end),
        i64::from(setup.window_size),
        AggregationMode::OneWayAndCollusion,
    )?;

    let mut report = CalibrationReport::default();
    for replicate in 0..setup.replicates {
        let dataset = replicate_dataset(setup, replicate)?;
        let mut detect = setup.detect.clone();
        detect.null.seed = replicate_seed(setup, replicate).str("null").finish();

        for window in spec.windows() {
            let (pairs, _) = eligible_pairs(&dataset, &window)?;
            let tested: HashSet<_> = pairs.iter().cloned().collect();
            report.unordered_pair_windows += pairs
                .iter()
                .filter(|p| p.giver < p.receiver && tested.contains(&p.reversed()))
                .count();

            let window_report = detect_window(&dataset, &window, &detect)?;
            report.pair_windows += window_report.pairs_tested;
            report.significant += window_report.edges.len();
            report.collusive += window_report
                .edges
                .iter()
                .filter(|e| e.kind == EdgeKind::Collusive && e.from < e.to)
                .count();
        }
    }
    Ok(report)
}

fn check_countries(setup: &CalibrationSetup) -> Result<()> {
    let available = RegionRegistry::builtin().len();
    if setup.countries < 2 || setup.countries > available {
        return Err(Error::InvalidSpec(format!(
            "calibration needs between 2 and {available} countries"
        )));
    }
    Ok(())
}

fn replicate_seed(setup: &CalibrationSetup, replicate: usize) -> SeedBuilder {
    SeedBuilder::new(setup.seed).u64(replicate as u64)
}

/// The synthetic null dataset used for one calibration replicate.
pub fn replicate_dataset(setup: &CalibrationSetup, replicate: usize) -> Result<Dataset> {
    check_countries(setup)?;
    let countries = builtin_countries(setup.countries);
    let layout = SyntheticLayout::uniform(setup.start, setup.end, &countries);
    let seed = replicate_seed(setup, replicate).str("data").finish();
    null_dataset(&layout, RegionRegistry::builtin(), seed)
}
