//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Criterion 5 needs the historical contest data
//! in the escbias CSV layout, pointed to by ESCBIAS_DATA.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use escbias::calibration::{run_calibration, CalibrationSetup};
use escbias::schemes::SchemeFamily;
use escbias::synthetic::{builtin_countries, null_dataset, SyntheticLayout};
use escbias::verify::{run_suite, ORACLE_TOLERANCE};
use escbias::{
    aggregate, exact_null_pmf, load_dataset, scheme_for_year, AggregationMode, AggregationSpec,
    BiasNetwork, CountryId, DetectConfig, Execution, NullConfig, RegionRegistry, VotingScheme,
};
use tempfile::TempDir;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Verdict {
    let started = Instant::now();
    let outcomes = run_suite(&NullConfig::default(), Execution::Parallel).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| {
            format!(
                "{} N={} c={}: monte carlo {:.2} vs exact {:.2} (exact P(mean>t)={:.4})",
                o.case.label, o.case.years, o.case.candidates, o.monte_carlo, o.exact, o.tail_above
            )
        })
        .collect();
    let detail = format!(
        "{}/{} cases within ±{ORACLE_TOLERANCE} in {elapsed:.1?}{}{}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        if failed.is_empty() { "" } else { "; outside: " },
        failed.join("; ")
    );
    check(failed.is_empty() && outcomes.len() == 30 && elapsed < Duration::from_secs(30), detail)
}

fn closed_forms() -> Verdict {
    let pmf = |scheme: VotingScheme, c| exact_null_pmf(&scheme, c).map_err(|e| e.to_string());
    let alloc = pmf(VotingScheme::allocated([3, 2, 1]).unwrap(), 15)?.prob(0);
    let rated = pmf(scheme_for_year(1971).unwrap(), 20)?.mean();
    let ones = pmf(scheme_for_year(1960).unwrap(), 9)?.prob(0);
    let detail = format!(
        "P(0)={alloc:.15} vs 12/15; rated mean={rated:.15}; ten ones P(0)={ones:.15} vs (8/9)^10"
    );
    check(
        (alloc - 12.0 / 15.0).abs() < 1e-12
            && (rated - 6.0).abs() < 1e-12
            && (ones - (8.0f64 / 9.0).powi(10)).abs() < 1e-12,
        detail,
    )
}

fn calibration() -> Verdict {
    let started = Instant::now();
    let report = run_calibration(&CalibrationSetup::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let rate = report.significance_rate();
    let collusive = report.collusion_rate();
    let detail = format!(
        "significance {:.2}% over {} pair-windows, collusive {:.3}% over {} pairs, {elapsed:.1?}",
        100.0 * rate,
        report.pair_windows,
        100.0 * collusive,
        report.unordered_pair_windows
    );
    check(
        (rate - 0.05).abs() <= 0.015
            && report.pair_windows >= 1000
            && (collusive - 0.0025).abs() <= 0.002
            && elapsed < Duration::from_secs(120),
        detail,
    )
}

fn window_arithmetic(tmp: &Path) -> Verdict {
    let spec = AggregationSpec::new(1975, 1995, 5, AggregationMode::CollusionOnly).map_err(|e| e.to_string())?;
    let data = tmp.join("window-data");
    let layout = SyntheticLayout::uniform(1975, 1994, &builtin_countries(8));
    null_dataset(&layout, RegionRegistry::builtin(), 4)
        .and_then(|d| d.write(&data))
        .map_err(|e| e.to_string())?;
    let out = tmp.join("window-out");
    let stdout = run_cli(&data, &out, &["--start", "1975", "--end", "1995", "--window", "5"], None)?;
    let windows: Vec<String> = spec.windows().iter().map(|w| w.to_string()).collect();
    check(
        spec.window_count() == 4 && stdout.starts_with("4 windows"),
        format!("{} windows: {}", spec.window_count(), windows.join(", ")),
    )
}

fn real_data() -> Verdict {
    let Some(dir) = std::env::var_os("ESCBIAS_DATA") else {
        return Err("ESCBIAS_DATA is not set; the historical contest data is not available".into());
    };
    let data = load_dataset(&dir).map_err(|e| e.to_string())?;
    let config = DetectConfig::default();
    let run = |start, end, size, mode| -> Result<BiasNetwork, String> {
        let spec = AggregationSpec::new(start, end, size, mode).map_err(|e| e.to_string())?;
        aggregate(&data, &spec, &config).map_err(|e| e.to_string())
    };
    let id = CountryId::new;

    let south = run(1997, 2012, 5, AggregationMode::CollusionOnly)?;
    let greece_cyprus = south.collusion_count(&id("Greece"), &id("Cyprus"));

    let north = run(1980, 2000, 10, AggregationMode::CollusionOnly)?;
    let nordic = ["Sweden", "Denmark", "Norway", "Finland", "Iceland"];
    let connected = connected_within(&north, &nordic);

    let one_way = run(1996, 2006, 10, AggregationMode::OneWayAndCollusion)?;
    let germany_turkey = one_way.one_way_count(&id("Germany"), &id("Turkey"));

    check(
        greece_cyprus > 0 && connected && germany_turkey > 0,
        format!(
            "Greece-Cyprus collusive in {greece_cyprus} windows; northern cluster connected: {connected}; \
             Germany->Turkey one-way in {germany_turkey} windows"
        ),
    )
}

fn connected_within(network: &BiasNetwork, members: &[&str]) -> bool {
    let members: BTreeSet<CountryId> = members.iter().map(|m| CountryId::new(*m)).collect();
    let mut adjacent: BTreeMap<&CountryId, Vec<&CountryId>> = BTreeMap::new();
    for (a, b) in network.collusive().keys() {
        if members.contains(a) && members.contains(b) {
            adjacent.entry(a).or_default().push(b);
            adjacent.entry(b).or_default().push(a);
        }
    }
    let start = members.iter().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        for &next in adjacent.get(node).into_iter().flatten() {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() == members.len()
}

fn run_cli(data: &Path, out: &Path, args: &[&str], workers: Option<&str>) -> Result<String, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_escbias"));
    cmd.arg("--data").arg(data).arg("--out").arg(out).args(args);
    if let Some(w) = workers {
        cmd.args(["--workers", w]);
    }
    let res = cmd.output().map_err(|e| e.to_string())?;
    if !res.status.success() {
        return Err(String::from_utf8_lossy(&res.stderr).trim().to_string());
    }
    Ok(String::from_utf8_lossy(&res.stdout).into_owned())
}

fn determinism(tmp: &Path) -> Verdict {
    let data = tmp.join("det-data");
    let layout = SyntheticLayout::uniform(1985, 1994, &builtin_countries(14));
    null_dataset(&layout, RegionRegistry::builtin(), 6)
        .and_then(|d| d.write(&data))
        .map_err(|e| e.to_string())?;
    let args = ["--start", "1985", "--end", "1995", "--window", "5", "--mode", "all-edges"];
    let runs = [(None, "a"), (None, "b"), (Some("1"), "c"), (Some("4"), "d")];
    let mut outputs = Vec::new();
    for (workers, name) in runs {
        let out = tmp.join(format!("det-{name}"));
        run_cli(&data, &out, &args, workers)?;
        let dot = fs::read(out.join("network.dot")).map_err(|e| e.to_string())?;
        let edges = fs::read(out.join("edges.csv")).map_err(|e| e.to_string())?;
        outputs.push((dot, edges));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let lines = outputs[0].1.iter().filter(|b| **b == b'\n').count() - 1;
    check(
        same && lines > 0,
        format!("4 runs (default, default, 1 worker, 4 workers) identical: {same}; {lines} edge rows"),
    )
}

fn full_history(tmp: &Path) -> Verdict {
    let data = tmp.join("full-data");
    let layout = SyntheticLayout::full_history(11);
    null_dataset(&layout, RegionRegistry::builtin(), 12)
        .and_then(|d| d.write(&data))
        .map_err(|e| e.to_string())?;
    let spec = AggregationSpec::new(1957, 2017, 5, AggregationMode::CollusionOnly).map_err(|e| e.to_string())?;
    let mixed = spec
        .windows()
        .iter()
        .filter(|w| {
            let families: BTreeSet<SchemeFamily> =
                w.years().map(|y| scheme_for_year(i64::from(y)).unwrap().family()).collect();
            families.len() > 1
        })
        .count();
    let families: BTreeSet<SchemeFamily> = spec
        .windows()
        .iter()
        .flat_map(|w| w.years())
        .map(|y| scheme_for_year(i64::from(y)).unwrap().family())
        .collect();

    let started = Instant::now();
    let out = tmp.join("full-out");
    let stdout = run_cli(&data, &out, &["--start", "1957", "--end", "2017", "--window", "5"], None)?;
    check(
        stdout.starts_with("12 windows") && families.len() == 3 && mixed > 0,
        format!(
            "{} in {:.1?}; {} scheme families, {mixed} windows mixing families",
            stdout.lines().next().unwrap_or_default(),
            started.elapsed(),
            families.len()
        ),
    )
}

fn main() -> ExitCode {
    let tmp = TempDir::new().expect("temporary directory");
    let criteria: [Criterion; 7] = [
        ("1 oracle equivalence", Box::new(oracle_equivalence)),
        ("2 closed-form spot checks", Box::new(closed_forms)),
        ("3 null calibration", Box::new(calibration)),
        ("4 window arithmetic", Box::new(|| window_arithmetic(tmp.path()))),
        ("5 historical findings", Box::new(real_data)),
        ("6 determinism", Box::new(|| determinism(tmp.path()))),
        ("7 full history", Box::new(|| full_history(tmp.path()))),
    ];
    let mut failures = 0;
    for (name, criterion) in &criteria {
        match criterion() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
