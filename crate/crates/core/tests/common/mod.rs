#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use escbias::synthetic::{builtin_countries, null_dataset, SyntheticLayout};
use escbias::{CountryId, Dataset, RegionRegistry, YearRecord};

pub fn ids(names: &[&str]) -> BTreeSet<CountryId> {
    names.iter().map(|n| CountryId::new(*n)).collect()
}

/// A year where every listed country gives and receives, with scores taken
/// from `score(giver, receiver)`.
pub fn year(
    year: u16,
    countries: &[&str],
    score: impl Fn(&str, &str) -> u32,
) -> YearRecord {
    let set = ids(countries);
    let mut scores = BTreeMap::new();
    for g in countries {
        for r in countries {
            if g != r {
                scores.insert((CountryId::new(*g), CountryId::new(*r)), score(g, r));
            }
        }
    }
    YearRecord::new(year, set.clone(), set, scores).unwrap()
}

/// Null-model data over `start..=end` for the first `n` builtin countries.
pub fn null_data(start: u16, end: u16, n: usize, seed: u64) -> Dataset {
    let layout = SyntheticLayout::uniform(start, end, &builtin_countries(n));
    null_dataset(&layout, RegionRegistry::builtin(), seed).unwrap()
}

/// Ballot for a 1975-era year where `fav` always gets 12 from `giver` and the
/// remaining scores go to the other countries in name order.
pub fn allocated_ballots(countries: &[&str], favourites: &[(&str, &str)]) -> impl Fn(&str, &str) -> u32 {
    let countries: Vec<String> = countries.iter().map(|s| s.to_string()).collect();
    let favourites: Vec<(String, String)> = favourites
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    move |g, r| {
        const SCORES: [u32; 10] = [12, 10, 8, 7, 6, 5, 4, 3, 2, 1];
        let fav = favourites.iter().find(|(a, _)| a == g).map(|(_, b)| b.as_str());
        let mut order: Vec<&str> = countries.iter().map(String::as_str).filter(|c| *c != g).collect();
        if let Some(f) = fav {
            order.retain(|c| *c != f);
            order.insert(0, f);
        } else {
            // spread the 12s so nobody else stands out
            let shift = countries.iter().position(|c| c == g).unwrap_or(0);
            let n = order.len();
            order.rotate_left(shift % n);
        }
        order
            .iter()
            .position(|c| *c == r)
            .and_then(|i| SCORES.get(i).copied())
            .unwrap_or(0)
    }
}
