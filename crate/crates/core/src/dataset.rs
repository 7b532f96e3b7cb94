//! Per-year score matrices and their validation.
//!
//! On disk a dataset is a directory with one `<year>.csv` per contest year and
//! a `regions.csv`. A year file is a matrix: the header is `giver` followed by
//! the receiver names, each row starts with a giver name, and each cell holds
//! the points that giver awarded that receiver (0 when none). A giver's own
//! column, when present, must be 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::RegionRegistry;
use crate::schemes::VotingScheme;
use crate::{FIRST_YEAR, LAST_YEAR};

/// Year from which only finalists receive points.
const FINALS_FROM: u16 = 2004;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountryId(String);

impl CountryId {
    pub fn new(name: impl Into<String>) -> Self {
        CountryId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CountryId {
    fn from(s: &str) -> Self {
        CountryId::new(s)
    }
}

/// Judge scores of a single contest year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearRecord {
    year: u16,
    givers: BTreeSet<CountryId>,
    receivers: BTreeSet<CountryId>,
    scores: BTreeMap<(CountryId, CountryId), u32>,
}

impl YearRecord {
    /// Validates and assembles a year.
    ///
    /// `scores` must hold an entry for every giver/receiver combination except
    /// a country scoring itself. Zero-valued self entries are dropped; any
    /// other self entry is a [`Error::SelfVote`].
    pub fn new(
        year: u16,
        givers: BTreeSet<CountryId>,
        receivers: BTreeSet<CountryId>,
        mut scores: BTreeMap<(CountryId, CountryId), u32>,
    ) -> Result<Self> {
        let scheme = VotingScheme::for_year(i64::from(year))?;

        if receivers.len() < 2 {
            return Err(Error::TooFewReceivers {
                year,
                found: receivers.len(),
            });
        }
        if year < FINALS_FROM && givers != receivers {
            return Err(Error::ParticipantMismatch { year });
        }

        let self_votes: Vec<_> = scores.keys().filter(|(g, r)| g == r).cloned().collect();
        for key in self_votes {
            if scores.remove(&key) != Some(0) {
                return Err(Error::SelfVote {
                    year,
                    country: key.0.to_string(),
                });
            }
        }

        let expected = givers
            .iter()
            .flat_map(|g| receivers.iter().filter(move |r| *r != g).map(move |r| (g, r)));
        let mut count = 0;
        for (g, r) in expected {
            count += 1;
            if !scores.contains_key(&(g.clone(), r.clone())) {
                return Err(Error::MissingCell {
                    year,
                    giver: g.to_string(),
                    receiver: r.to_string(),
                });
            }
        }
        if count != scores.len() {
            let stray = scores
                .keys()
                .find(|(g, r)| !givers.contains(g) || !receivers.contains(r))
                .expect("extra entry exists");
            return Err(Error::malformed(
                format!("{year}"),
                format!("score {} -> {} outside the participant sets", stray.0, stray.1),
            ));
        }

        let attainable = scheme.attainable_scores();
        for ((g, r), &score) in &scores {
            if !attainable.contains(&score) {
                return Err(Error::UnattainableScore {
                    year,
                    giver: g.to_string(),
                    receiver: r.to_string(),
                    score,
                });
            }
        }

        let record = Self {
            year,
            givers,
            receivers,
            scores,
        };
        for g in &record.givers {
            let ballot: Vec<u32> = record.ballot(g).map(|(_, s)| s).collect();
            if !scheme.is_valid_ballot(&ballot) {
                return Err(Error::UnattainableBallot {
                    year,
                    giver: g.to_string(),
                });
            }
        }
        Ok(record)
    }

    pub fn year(&self) -> u16 {
        self.year
    }

    pub fn givers(&self) -> &BTreeSet<CountryId> {
        &self.givers
    }

    pub fn receivers(&self) -> &BTreeSet<CountryId> {
        &self.receivers
    }

    pub fn scheme(&self) -> VotingScheme {
        VotingScheme::for_year(i64::from(self.year)).expect("validated on construction")
    }

    /// Points `giver` awarded `receiver`, if both took part in the roles.
    pub fn score(&self, giver: &CountryId, receiver: &CountryId) -> Option<u32> {
        self.scores.get(&(giver.clone(), receiver.clone())).copied()
    }

    /// Scores awarded by one giver, by receiver.
    pub fn ballot<'a>(&'a self, giver: &'a CountryId) -> impl Iterator<Item = (&'a CountryId, u32)> + 'a {
        self.receivers
            .iter()
            .filter(move |r| *r != giver)
            .filter_map(move |r| self.score(giver, r).map(|s| (r, s)))
    }

    /// Number of countries `giver` may award: the receivers minus itself.
    pub fn candidate_count(&self, giver: &CountryId) -> u32 {
        let n = self.receivers.len() as u32;
        if self.receivers.contains(giver) {
            n - 1
        } else {
            n
        }
    }

    pub fn read_csv<R: io::Read>(year: u16, reader: R, context: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::malformed(context, e.to_string()))?
            .clone();
        if headers.get(0) != Some("giver") {
            return Err(Error::malformed(context, "first header must be `giver`"));
        }
        let receiver_cols: Vec<CountryId> = headers.iter().skip(1).map(CountryId::new).collect();
        let receivers: BTreeSet<CountryId> = receiver_cols.iter().cloned().collect();
        if receivers.len() != receiver_cols.len() {
            return Err(Error::malformed(context, "duplicate receiver column"));
        }
        if let Some(bad) = receiver_cols.iter().find(|c| c.0.is_empty()) {
            return Err(Error::malformed(context, format!("empty receiver name {bad:?}")));
        }

        let mut givers = BTreeSet::new();
        let mut scores = BTreeMap::new();
        for (i, row) in rdr.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::malformed(context, e.to_string()))?;
            let giver = CountryId::new(&row[0]);
            if giver.0.is_empty() {
                return Err(Error::malformed(context, format!("line {line}: empty giver name")));
            }
            if !givers.insert(giver.clone()) {
                return Err(Error::malformed(
                    context,
                    format!("line {line}: duplicate giver {giver}"),
                ));
            }
            for (receiver, cell) in receiver_cols.iter().zip(row.iter().skip(1)) {
                if cell.is_empty() {
                    return Err(Error::MissingCell {
                        year,
                        giver: giver.to_string(),
                        receiver: receiver.to_string(),
                    });
                }
                let points: u32 = cell.parse().map_err(|_| {
                    Error::malformed(
                        context,
                        format!("line {line}: {giver} -> {receiver}: {cell:?} is not a point count"),
                    )
                })?;
                scores.insert((giver.clone(), receiver.clone()), points);
            }
        }
        Self::new(year, givers, receivers, scores)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(
            std::iter::once("giver").chain(self.receivers.iter().map(CountryId::as_str)),
        )?;
        for g in &self.givers {
            let mut row = vec![g.to_string()];
            row.extend(
                self.receivers
                    .iter()
                    .map(|r| self.score(g, r).unwrap_or(0).to_string()),
            );
            wtr.write_record(&row)?;
        }
        wtr.flush()
    }
}

/// All loaded years plus the region registry. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    years: BTreeMap<u16, YearRecord>,
    regions: RegionRegistry,
}

impl Dataset {
    pub fn new(
        records: impl IntoIterator<Item = YearRecord>,
        regions: RegionRegistry,
    ) -> Result<Self> {
        let mut years = BTreeMap::new();
        for rec in records {
            let year = rec.year;
            for c in rec.givers.iter().chain(&rec.receivers) {
                if !regions.contains(c) {
                    return Err(Error::UnknownCountry {
                        name: c.to_string(),
                        context: format!("{year}.csv"),
                    });
                }
            }
            if years.insert(year, rec).is_some() {
                return Err(Error::malformed(format!("{year}"), "year given twice"));
            }
        }
        Ok(Self { years, regions })
    }

    /// Loads `<year>.csv` files and `regions.csv` from a directory.
    pub fn load(dir: &Path) -> Result<Self> {
        let regions = RegionRegistry::load(&dir.join("regions.csv"))?;
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = BTreeMap::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name();
            let Some(stem) = name.to_str().and_then(|n| n.strip_suffix(".csv")) else {
                continue;
            };
            if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
                continue;
            }
            let year: i64 = stem
                .parse()
                .map_err(|_| Error::UnsupportedYear(i64::MAX))?;
            if !(i64::from(FIRST_YEAR)..=i64::from(LAST_YEAR)).contains(&year) {
                return Err(Error::UnsupportedYear(year));
            }
            files.insert(year as u16, entry.path());
        }

        let mut records = Vec::with_capacity(files.len());
        for (year, path) in files {
            let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            records.push(YearRecord::read_csv(year, file, &path.display().to_string())?);
        }
        Self::new(records, regions)
    }

    /// Writes the dataset in the layout [`Dataset::load`] reads.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("regions.csv");
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.regions
            .write_csv(file)
            .map_err(|e| Error::io(&path, e))?;
        for rec in self.years.values() {
            let path = dir.join(format!("{}.csv", rec.year));
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            rec.write_csv(file).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn regions(&self) -> &RegionRegistry {
        &self.regions
    }

    pub fn year(&self, year: u16) -> Result<&YearRecord> {
        self.years.get(&year).ok_or(Error::MissingYear(year))
    }

    /// Years in ascending order.
    pub fn years(&self) -> impl Iterator<Item = &YearRecord> {
        self.years.values()
    }

    pub fn contains_year(&self, year: u16) -> bool {
        self.years.contains_key(&year)
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    /// Copy of the dataset with one country removed from every year.
    pub fn without_country(&self, country: &CountryId) -> Result<Self> {
        let records = self
            .years
            .values()
            .map(|rec| {
                let givers = rec.givers.iter().filter(|c| *c != country).cloned().collect();
                let receivers = rec.receivers.iter().filter(|c| *c != country).cloned().collect();
                let scores = rec
                    .scores
                    .iter()
                    .filter(|((g, r), _)| g != country && r != country)
                    .map(|(k, v)| (k.clone(), *v))
                    .collect();
                YearRecord::new(rec.year, givers, receivers, scores)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(records, self.regions.clone())
    }
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    Dataset::load(dir.as_ref())
}

/// Giver and receiver sets of a loaded year.
pub fn participants(
    dataset: &Dataset,
    year: u16,
) -> Result<(&BTreeSet<CountryId>, &BTreeSet<CountryId>)> {
    let rec = dataset.year(year)?;
    Ok((&rec.givers, &rec.receivers))
}
