//! Six-region labelling of participating countries, used for node colouring.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::CountryId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Southwest,
    Northwest,
    North,
    Central,
    Southeast,
    East,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::Southwest,
        Region::Northwest,
        Region::North,
        Region::Central,
        Region::Southeast,
        Region::East,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Region::Southwest => "southwest",
            Region::Northwest => "northwest",
            Region::North => "north",
            Region::Central => "central",
            Region::Southeast => "southeast",
            Region::East => "east",
        }
    }

    /// Graphviz colour name attached to the region.
    pub fn color(self) -> &'static str {
        match self {
            Region::Southwest => "red",
            Region::Northwest => "turquoise",
            Region::North => "blue",
            Region::Central => "gray",
            Region::Southeast => "orange",
            Region::East => "green",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.label() == s)
            .ok_or_else(|| Error::InvalidRegion(format!("unknown region label {s:?}")))
    }
}

const BUILTIN: &[(Region, &[&str])] = &[
    (
        Region::Southwest,
        &["Portugal", "Spain", "Malta", "SanMarino", "Andorra", "Monaco", "Morocco", "Italy"],
    ),
    (
        Region::Northwest,
        &["UnitedKingdom", "Ireland", "Belgium", "France", "Luxembourg"],
    ),
    (Region::North, &["Iceland", "Denmark", "Norway", "Sweden", "Finland"]),
    (
        Region::Central,
        &[
            "Germany",
            "Austria",
            "TheNetherlands",
            "Switzerland",
            "Slovenia",
            "CzechRepublic",
            "Hungary",
        ],
    ),
    (
        Region::Southeast,
        &[
            "Greece",
            "Montenegro",
            "Cyprus",
            "Albania",
            "Bulgaria",
            "Croatia",
            "BosniaHerzegovina",
            "Turkey",
            "FYRMacedonia",
            "Romania",
            "Serbia",
            "Israel",
            "Yugoslavia",
        ],
    ),
    (
        Region::East,
        &[
            "Russia",
            "Ukraine",
            "Moldova",
            "Belarus",
            "Poland",
            "Georgia",
            "Armenia",
            "Azerbaijan",
            "Estonia",
            "Lithuania",
            "Latvia",
        ],
    ),
];

/// Mapping from country to region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionRegistry {
    entries: BTreeMap<CountryId, Region>,
}

impl RegionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The standard six-region table covering the countries that took part
    /// between 1957 and 2017.
    pub fn builtin() -> Self {
        let entries = BUILTIN
            .iter()
            .flat_map(|(region, names)| names.iter().map(move |n| (CountryId::new(*n), *region)))
            .collect();
        Self { entries }
    }

    pub fn insert(&mut self, country: CountryId, region: Region) -> Option<Region> {
        self.entries.insert(country, region)
    }

    pub fn get(&self, country: &CountryId) -> Option<Region> {
        self.entries.get(country).copied()
    }

    pub fn contains(&self, country: &CountryId) -> bool {
        self.entries.contains_key(country)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountryId, Region)> {
        self.entries.iter().map(|(c, r)| (c, *r))
    }

    /// Reads a `country,region,color` table. The colour column must agree with
    /// the region's fixed colour.
    pub fn read_csv<R: io::Read>(reader: R, context: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::malformed(context, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["country", "region", "color"] {
            return Err(Error::malformed(
                context,
                "header must be exactly `country,region,color`",
            ));
        }

        let mut registry = Self::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::malformed(context, e.to_string()))?;
            let line = i + 2;
            let name = &row[0];
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::malformed(
                    context,
                    format!("line {line}: country name {name:?} must be non-empty without spaces"),
                ));
            }
            let region: Region = row[1].parse()?;
            if row[2] != *region.color() {
                return Err(Error::InvalidRegion(format!(
                    "{name}: region {region} must be coloured {}, found {:?}",
                    region.color(),
                    &row[2]
                )));
            }
            if registry.insert(CountryId::new(name), region).is_some() {
                return Err(Error::malformed(
                    context,
                    format!("line {line}: duplicate country {name}"),
                ));
            }
        }
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, &path.display().to_string())
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["country", "region", "color"])?;
        for (country, region) in self.iter() {
            wtr.write_record([country.as_str(), region.label(), region.color()])?;
        }
        wtr.flush()
    }
}

impl FromIterator<(CountryId, Region)> for RegionRegistry {
    fn from_iter<I: IntoIterator<Item = (CountryId, Region)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}
