mod common;

use std::collections::BTreeMap;

use escbias::nullmodel::{pair_window_seed, NullPlan};
use escbias::{
    compute_threshold, convolve_years, exact_null_pmf, sample_window_means, scheme_for_year,
    threshold_from_samples, CountryId, Error, NullConfig, Pair, WindowSpec,
};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn window(a: i64, b: i64) -> WindowSpec {
    WindowSpec::new(a, b).unwrap()
}

#[test]
fn single_rated_year_mean_is_six() {
    let ds = common::null_data(1972, 1972, 17, 1);
    let pair = Pair::new("France", "Italy");
    let means = sample_window_means(&ds, &pair, &window(1972, 1972), 1_000_000, 7).unwrap();
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    assert!((avg - 6.0).abs() < 0.01, "{avg}");
}

#[test]
fn rated_window_means_are_bounded() {
    let ds = common::null_data(1971, 1973, 17, 2);
    let pair = Pair::new("France", "Italy");
    let means = sample_window_means(&ds, &pair, &window(1971, 1973), 50_000, 8).unwrap();
    assert!(means.iter().all(|m| (2.0..=10.0).contains(m)));
}

#[test]
fn mixed_window_matches_convolution() {
    // 1974 is sequential, 1975-76 allocated
    let ds = common::null_data(1974, 1976, 18, 3);
    let pair = Pair::new("Sweden", "Norway");
    let w = window(1974, 1976);
    let n = 200_000;
    let means = sample_window_means(&ds, &pair, &w, n, 99).unwrap();

    let pmfs: Vec<_> = (1974..=1976)
        .map(|y| exact_null_pmf(&scheme_for_year(y).unwrap(), 17).unwrap())
        .collect();
    let exact = convolve_years(&pmfs).unwrap();

    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for m in &means {
        let total = (m * 3.0).round() as u32;
        assert!((f64::from(total) / 3.0 - m).abs() < 1e-12);
        *hist.entry(total).or_default() += 1;
    }
    let (mut stat, mut bins, mut pool_o, mut pool_e) = (0.0, 0, 0.0, 0.0);
    for (s, p) in exact.iter() {
        let e = p * n as f64;
        let o = hist.get(&s).copied().unwrap_or(0) as f64;
        if e < 5.0 {
            pool_o += o;
            pool_e += e;
        } else {
            stat += (o - e).powi(2) / e;
            bins += 1;
        }
    }
    stat += (pool_o - pool_e).powi(2) / pool_e;
    bins += 1;
    let p = 1.0 - ChiSquared::new(f64::from(bins - 1)).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square p = {p}");
    assert!(hist.keys().all(|s| exact.prob(*s) > 0.0));
}

#[test]
fn threshold_agrees_with_exact_quantile() {
    let ds = common::null_data(1975, 1979, 16, 4);
    let pair = Pair::new("Spain", "Norway");
    let w = window(1975, 1979);

    let pmfs: Vec<_> = (1975..=1979)
        .map(|y| exact_null_pmf(&scheme_for_year(y).unwrap(), 15).unwrap())
        .collect();
    let exact = convolve_years(&pmfs).unwrap();
    let cut = f64::from(exact.upper_quantile(0.05).unwrap()) / 5.0;
    assert_eq!(cut, 6.8);

    // P(mean >= 7.0) = 0.0477 sits one standard error below alpha at 1e4
    // samples, so the default sample size can land one lattice step (0.2) high.
    let t = compute_threshold(&ds, &pair, &w, &NullConfig::default()).unwrap();
    assert_eq!(t.sample_size, 10_000);
    assert!((t.threshold - cut).abs() <= 0.2 + 1e-12, "{} vs {cut}", t.threshold);

    let big = NullConfig { sample_size: 1_000_000, ..NullConfig::default() };
    let t = compute_threshold(&ds, &pair, &w, &big).unwrap();
    assert!((t.threshold - cut).abs() <= 0.05, "{} vs {cut}", t.threshold);
}

#[test]
fn thresholds_are_reproducible() {
    let ds = common::null_data(1975, 1979, 12, 5);
    let pair = Pair::new("France", "Germany");
    let w = window(1975, 1979);
    let config = NullConfig::default();
    let a = compute_threshold(&ds, &pair, &w, &config).unwrap();
    let b = compute_threshold(&ds, &pair, &w, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
    assert_eq!(a.seed, pair_window_seed(config.seed, &pair, &w));

    let other = NullConfig { seed: config.seed + 1, ..config };
    assert_ne!(compute_threshold(&ds, &pair, &w, &other).unwrap().seed, a.seed);
}

#[test]
fn adaptive_mode_stops() {
    let ds = common::null_data(1971, 1973, 12, 6);
    let config = NullConfig {
        adaptive: true,
        ..NullConfig::default()
    };
    let t = compute_threshold(&ds, &Pair::new("France", "Italy"), &window(1971, 1973), &config)
        .unwrap();
    assert!(t.sample_size > 10_000 && t.sample_size <= 1_000_000);
}

#[test]
fn ineligible_pairs_are_rejected() {
    let ds = common::null_data(1975, 1979, 10, 7);
    let w = window(1975, 1979);
    let pair = Pair::new("France", "Narnia");
    assert!(matches!(
        sample_window_means(&ds, &pair, &w, 10, 1),
        Err(Error::IneligiblePair { year: 1975, .. })
    ));
    let self_pair = Pair::new("France", "France");
    assert!(matches!(
        compute_threshold(&ds, &self_pair, &w, &NullConfig::default()),
        Err(Error::IneligiblePair { .. })
    ));
    assert!(matches!(
        compute_threshold(&ds, &Pair::new("France", "Italy"), &window(1975, 1980), &NullConfig::default()),
        Err(Error::MissingYear(1980))
    ));
}

#[test]
fn candidate_override_is_used() {
    let ds = common::null_data(1975, 1975, 10, 8);
    let pair = Pair::new("France", "Italy");
    let w = window(1975, 1975);
    let plan = NullPlan::for_pair(&ds, &pair, &w, Some(&BTreeMap::from([(1975, 30)]))).unwrap();
    assert_eq!(plan.draws()[0].candidates, 30);
    let plan = NullPlan::for_pair(&ds, &pair, &w, None).unwrap();
    assert_eq!(plan.draws()[0].candidates, 9);
    let _ = CountryId::new("unused");
}

proptest! {
    #[test]
    fn threshold_is_non_increasing_in_alpha(
        means in prop::collection::vec(0.0f64..12.0, 1..300),
        a in 0.001f64..0.999,
        b in 0.001f64..0.999,
    ) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t_lo = threshold_from_samples(&means, lo).unwrap();
        let t_hi = threshold_from_samples(&means, hi).unwrap();
        prop_assert!(t_hi <= t_lo);
        let max = means.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(t_lo <= max);
    }

    #[test]
    fn threshold_never_exceeds_max_mean(start in 1957i64..2013, len in 0i64..5, c in 1u32..40, seed in any::<u64>()) {
        let draws = (start..=start + len)
            .map(|y| escbias::nullmodel::YearDraw {
                year: y as u16,
                scheme: scheme_for_year(y).unwrap(),
                candidates: c,
            })
            .collect();
        let plan = NullPlan::new(draws).unwrap();
        let config = NullConfig { sample_size: 500, ..NullConfig::default() };
        let (t, _) = plan.threshold(&config, seed).unwrap();
        prop_assert!(t >= 0.0 && t <= plan.max_mean());
    }
}
