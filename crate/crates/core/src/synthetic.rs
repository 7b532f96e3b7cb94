//! Synthetic datasets drawn from the unbiased null model.
//!
//! Every giver casts a complete, scheme-valid ballot: allocated scores go to a
//! uniformly shuffled set of candidates, sequential points each land on a
//! uniform candidate and rated receivers get independent juror sums. The
//! marginal score of any single pair therefore follows the same law as the
//! Monte Carlo sampler.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::{CountryId, Dataset, YearRecord};
use crate::error::{Error, Result};
use crate::regions::RegionRegistry;
use crate::schemes::VotingScheme;
use crate::seed::{rng_from_seed, SeedBuilder};
use crate::{FIRST_YEAR, LAST_YEAR};

/// Who gives and who receives in each synthetic year.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntheticLayout {
    years: BTreeMap<u16, (BTreeSet<CountryId>, BTreeSet<CountryId>)>,
}

impl SyntheticLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every country gives and receives in every year of `start..=end`.
    pub fn uniform(start: u16, end: u16, countries: &[CountryId]) -> Self {
        let set: BTreeSet<CountryId> = countries.iter().cloned().collect();
        let mut layout = Self::new();
        for year in start..=end {
            layout.set_year(year, set.clone(), set.clone());
        }
        layout
    }

    pub fn set_year(
        &mut self,
        year: u16,
        givers: BTreeSet<CountryId>,
        receivers: BTreeSet<CountryId>,
    ) -> &mut Self {
        self.years.insert(year, (givers, receivers));
        self
    }

    pub fn years(&self) -> impl Iterator<Item = u16> + '_ {
        self.years.keys().copied()
    }

    /// A 1957–2017 layout over the builtin registry whose field grows from 10
    /// countries to about 40, with the occasional absence and, from 2004, a
    /// 26-country final drawn per year. Participation is illustrative only.
    pub fn full_history(seed: u64) -> Self {
        let pool: Vec<CountryId> = ENTRY_ORDER.iter().map(|n| CountryId::new(*n)).collect();
        let mut layout = Self::new();
        for year in FIRST_YEAR..=LAST_YEAR {
            let size = field_size(year).min(pool.len());
            let mut field: Vec<CountryId> = pool[..size].to_vec();
            if year % 4 == 1 && year < 2004 && size > 12 {
                // one long-standing entrant sits the year out
                let idx = usize::from(year / 4) % 10;
                field.remove(idx);
            }
            let givers: BTreeSet<CountryId> = field.iter().cloned().collect();
            let receivers = if year >= 2004 {
                let mut rng = rng_from_seed(SeedBuilder::new(seed).str("final").u64(u64::from(year)).finish());
                field.choose_multiple(&mut rng, 26).cloned().collect()
            } else {
                givers.clone()
            };
            layout.set_year(year, givers, receivers);
        }
        layout
    }
}

fn field_size(year: u16) -> usize {
    match year {
        1957..=1959 => 10,
        1960..=1962 => 13,
        1963..=1969 => 16,
        1970..=1979 => 18,
        1980..=1992 => 20,
        1993..=2003 => 24,
        2004..=2007 => 36,
        _ => 42,
    }
}

const ENTRY_ORDER: &[&str] = &[
    "TheNetherlands",
    "France",
    "Denmark",
    "Luxembourg",
    "Germany",
    "Italy",
    "UnitedKingdom",
    "Belgium",
    "Switzerland",
    "Austria",
    "Sweden",
    "Monaco",
    "Norway",
    "Spain",
    "Finland",
    "Yugoslavia",
    "Portugal",
    "Ireland",
    "Malta",
    "Israel",
    "Greece",
    "Turkey",
    "Cyprus",
    "Iceland",
    "Croatia",
    "Slovenia",
    "BosniaHerzegovina",
    "Estonia",
    "Hungary",
    "Lithuania",
    "Poland",
    "Romania",
    "Russia",
    "Latvia",
    "Ukraine",
    "Albania",
    "Serbia",
    "Belarus",
    "Bulgaria",
    "Moldova",
    "Armenia",
    "Georgia",
    "Azerbaijan",
    "Montenegro",
    "FYRMacedonia",
    "CzechRepublic",
    "SanMarino",
    "Andorra",
    "Morocco",
];

/// One null ballot: the score each candidate receives from a single giver.
pub fn null_ballot<R: Rng + ?Sized>(
    scheme: &VotingScheme,
    candidates: usize,
    rng: &mut R,
) -> Vec<u32> {
    let mut cells = vec![0u32; candidates];
    if candidates == 0 {
        return cells;
    }
    match scheme {
        VotingScheme::Allocated { scores } => {
            let mut order: Vec<usize> = (0..candidates).collect();
            order.shuffle(rng);
            for (&slot, &score) in order.iter().zip(scores) {
                cells[slot] = score;
            }
        }
        VotingScheme::Sequential { points } => {
            for &p in points {
                cells[rng.gen_range(0..candidates)] += p;
            }
        }
        VotingScheme::Rated {
            juror_scores,
            jurors,
        } => {
            for cell in &mut cells {
                *cell = (0..*jurors)
                    .map(|_| juror_scores[rng.gen_range(0..juror_scores.len())])
                    .sum();
            }
        }
    }
    cells
}

/// Draws a full dataset from the null model.
pub fn null_dataset(layout: &SyntheticLayout, regions: RegionRegistry, seed: u64) -> Result<Dataset> {
    let mut records = Vec::with_capacity(layout.years.len());
    for (&year, (givers, receivers)) in &layout.years {
        let scheme = VotingScheme::for_year(i64::from(year))?;
        let mut scores = BTreeMap::new();
        for giver in givers {
            let targets: Vec<&CountryId> = receivers.iter().filter(|r| *r != giver).collect();
            if targets.is_empty() {
                return Err(Error::TooFewReceivers { year, found: receivers.len() });
            }
            let mut rng = rng_from_seed(
                SeedBuilder::new(seed)
                    .u64(u64::from(year))
                    .str(giver.as_str())
                    .finish(),
            );
            let ballot = null_ballot(&scheme, targets.len(), &mut rng);
            for (r, s) in targets.into_iter().zip(ballot) {
                scores.insert((giver.clone(), r.clone()), s);
            }
        }
        records.push(YearRecord::new(year, givers.clone(), receivers.clone(), scores)?);
    }
    Dataset::new(records, regions)
}

/// First `n` countries of the builtin registry in a fixed order.
pub fn builtin_countries(n: usize) -> Vec<CountryId> {
    ENTRY_ORDER.iter().take(n).map(|c| CountryId::new(*c)).collect()
}
