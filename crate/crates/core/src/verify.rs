//! Monte Carlo thresholds checked against thresholds read from the exact
//! convolved null distribution.

use serde::Serialize;

use crate::error::Result;
use crate::exec::{map_collect, Execution};
use crate::nullmodel::{NullConfig, NullPlan, YearDraw};
use crate::schemes::{VotingScheme, SCORES_1962, SCORES_1964, SCORES_1971, SCORES_1975, TEN_SINGLE_POINTS};
use crate::seed::SeedBuilder;

/// Allowed gap between the Monte Carlo and exact thresholds, in mean-score units.
pub const ORACLE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCase {
    pub label: String,
    pub scheme: VotingScheme,
    pub years: usize,
    pub candidates: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub case: OracleCase,
    pub monte_carlo: f64,
    pub exact: f64,
    /// Exact P(mean >= exact threshold).
    pub tail_at_least: f64,
    /// Exact P(mean > exact threshold).
    pub tail_above: f64,
    pub passed: bool,
}

/// Five scheme families × window lengths {1, 5} × candidate counts {9, 15, 25}.
pub fn standard_cases() -> Vec<OracleCase> {
    let schemes = [
        ("allocated-1975", VotingScheme::Allocated { scores: SCORES_1975.to_vec() }),
        ("allocated-1962", VotingScheme::Allocated { scores: SCORES_1962.to_vec() }),
        ("sequential-ten-ones", VotingScheme::Sequential { points: TEN_SINGLE_POINTS.to_vec() }),
        ("sequential-5-3-1", VotingScheme::Sequential { points: SCORES_1964.to_vec() }),
        ("rated-1971", VotingScheme::Rated { juror_scores: SCORES_1971.to_vec(), jurors: 2 }),
    ];
    let mut cases = Vec::new();
    for (label, scheme) in schemes {
        for years in [1, 5] {
            for candidates in [9, 15, 25] {
                cases.push(OracleCase {
                    label: label.to_string(),
                    scheme: scheme.clone(),
                    years,
                    candidates,
                });
            }
        }
    }
    cases
}

impl OracleCase {
    pub fn plan(&self) -> Result<NullPlan> {
        NullPlan::new(
            (0..self.years)
                .map(|i| YearDraw {
                    year: i as u16,
                    scheme: self.scheme.clone(),
                    candidates: self.candidates,
                })
                .collect(),
        )
    }

    pub fn seed(&self, master: u64) -> u64 {
        SeedBuilder::new(master)
            .str(&self.label)
            .u64(self.years as u64)
            .u64(u64::from(self.candidates))
            .finish()
    }
}

pub fn run_case(case: &OracleCase, config: &NullConfig) -> Result<OracleOutcome> {
    let plan = case.plan()?;
    let (monte_carlo, _) = plan.threshold(config, case.seed(config.seed))?;
    let exact_total = plan.exact_total_pmf()?;
    let cut = exact_total.upper_quantile(config.alpha)?;
    let years = case.years as f64;
    let exact = f64::from(cut) / years;
    Ok(OracleOutcome {
        case: case.clone(),
        monte_carlo,
        exact,
        tail_at_least: exact_total.tail_at_least(cut),
        tail_above: exact_total.tail_above(cut),
        passed: (monte_carlo - exact).abs() <= ORACLE_TOLERANCE + 1e-12,
    })
}

pub fn run_suite(config: &NullConfig, execution: Execution) -> Result<Vec<OracleOutcome>> {
    config.validate()?;
    let cases = standard_cases();
    map_collect(execution, &cases, |c| run_case(c, config))
        .into_iter()
        .collect()
}
