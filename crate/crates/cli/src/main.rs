use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use escbias::calibration::{replicate_dataset, run_calibration, CalibrationSetup};
use escbias::dot::emit_dot;
use escbias::nullmodel::{ADAPTIVE_MAX_SAMPLES, DEFAULT_ALPHA, DEFAULT_SAMPLE_SIZE};
use escbias::seed::DEFAULT_SEED;
use escbias::verify::{run_suite, ORACLE_TOLERANCE};
use escbias::{
    aggregate, load_dataset, AggregationMode, AggregationSpec, DetectConfig, Execution, NullConfig,
};

/// Detect voting bias and collusion between Eurovision participants.
///
/// Without a subcommand, aggregates significant edges over stepping windows
/// and writes network.dot, edges.csv, skips.csv and run.json.
#[derive(Parser, Debug)]
#[command(name = "escbias", version, args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare Monte Carlo thresholds against exact convolution quantiles.
    VerifyOracle(OracleArgs),
    /// Measure false-positive rates on synthetic null data.
    Calibrate(CalibrateArgs),
    /// Repeat a run from its run.json.
    Replay(ReplayArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Collusion,
    AllEdges,
}

impl From<Mode> for AggregationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Collusion => AggregationMode::CollusionOnly,
            Mode::AllEdges => AggregationMode::OneWayAndCollusion,
        }
    }
}

#[derive(Args, Debug)]
struct NullArgs {
    /// Monte Carlo samples per pair-window.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SIZE)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// First year of the first window.
    #[arg(long, required = true, allow_negative_numbers = true)]
    start: Option<i64>,
    /// Windows are laid end to end from start; a partial one at the end is dropped.
    #[arg(long, required = true, allow_negative_numbers = true)]
    end: Option<i64>,
    /// Window size in years.
    #[arg(long, required = true, allow_negative_numbers = true)]
    window: Option<i64>,
    #[arg(long, value_enum, default_value_t = Mode::Collusion)]
    mode: Mode,
    #[command(flatten)]
    null: NullArgs,
    /// Grow the sample until the threshold settles.
    #[arg(long)]
    adaptive: bool,
    /// Divide alpha by the number of pairs tested per window.
    #[arg(long)]
    bonferroni: bool,
    /// Directory holding regions.csv and one CSV per contest year.
    #[arg(long, env = "ESCBIAS_DATA")]
    data: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    null: NullArgs,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 25)]
    countries: usize,
    #[arg(long, default_value_t = 1975)]
    start: u16,
    #[arg(long, default_value_t = 2015)]
    end: u16,
    #[arg(long, default_value_t = 5)]
    window: u16,
    #[arg(long, default_value_t = 2)]
    replicates: usize,
    #[command(flatten)]
    null: NullArgs,
    /// Also write the first synthetic replicate as a dataset directory.
    #[arg(long)]
    write_data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// A run.json written by an earlier run.
    config: PathBuf,
    /// Data directory; defaults to the one recorded in the config.
    #[arg(long, env = "ESCBIAS_DATA")]
    data: Option<PathBuf>,
    /// Output directory; defaults to the one recorded in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything needed to repeat a run, echoed to run.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunConfig {
    data_dir: PathBuf,
    out_dir: PathBuf,
    start: i64,
    end: i64,
    window: i64,
    mode: Mode,
    sample_size: usize,
    seed: u64,
    alpha: f64,
    adaptive: bool,
    max_samples: usize,
    bonferroni: bool,
}

impl RunConfig {
    fn from_args(args: RunArgs) -> anyhow::Result<Self> {
        let mut config = Self {
            data_dir: PathBuf::new(),
            out_dir: args.out,
            // required by clap when no subcommand is given
            start: args.start.unwrap_or_default(),
            end: args.end.unwrap_or_default(),
            window: args.window.unwrap_or_default(),
            mode: args.mode,
            sample_size: args.null.samples,
            seed: args.null.seed,
            alpha: args.null.alpha,
            adaptive: args.adaptive,
            max_samples: ADAPTIVE_MAX_SAMPLES,
            bonferroni: args.bonferroni,
        };
        config.spec()?;
        config.data_dir = args
            .data
            .context("no data directory: pass --data or set ESCBIAS_DATA")?;
        Ok(config)
    }

    fn spec(&self) -> escbias::Result<AggregationSpec> {
        AggregationSpec::new(self.start, self.end, self.window, self.mode.into())
    }

    fn detect(&self, execution: Execution) -> DetectConfig {
        DetectConfig {
            null: NullConfig {
                sample_size: self.sample_size,
                seed: self.seed,
                alpha: self.alpha,
                adaptive: self.adaptive,
                max_samples: self.max_samples,
                candidate_override: None,
            },
            bonferroni: self.bonferroni,
            execution,
        }
    }
}

fn null_config(args: &NullArgs) -> NullConfig {
    NullConfig {
        sample_size: args.samples,
        seed: args.seed,
        alpha: args.alpha,
        ..NullConfig::default()
    }
}

fn execution(workers: Option<usize>) -> anyhow::Result<Execution> {
    match workers {
        Some(0) => bail!("--workers must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot start worker pool")?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None if cfg!(feature = "parallel") => Ok(Execution::Parallel),
        None => Ok(Execution::Sequential),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn run(config: &RunConfig, execution: Execution) -> anyhow::Result<()> {
    let spec = config.spec()?;
    let detect = config.detect(execution);
    detect.null.validate()?;
    let dataset = load_dataset(&config.data_dir)?;

    let started = Instant::now();
    let network = aggregate(&dataset, &spec, &detect)?;

    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("cannot create {}", config.out_dir.display()))?;
    emit_dot(&network, config.out_dir.join("network.dot"))?;
    let mut edges = Vec::new();
    network.write_edges_csv(&mut edges)?;
    write_file(&config.out_dir.join("edges.csv"), &edges)?;
    let mut skips = Vec::new();
    network.write_skips_csv(&mut skips)?;
    write_file(&config.out_dir.join("skips.csv"), &skips)?;
    let mut echo = serde_json::to_vec_pretty(config)?;
    echo.push(b'\n');
    write_file(&config.out_dir.join("run.json"), &echo)?;

    println!(
        "{} windows, {} collusive pairs, {} one-way edges, {} skipped pair-windows ({:.1?})",
        network.windows().len(),
        network.collusive().len(),
        network.one_way().len(),
        network.skips().len(),
        started.elapsed()
    );
    println!("wrote {}", config.out_dir.display());
    Ok(())
}

fn verify_oracle(args: &OracleArgs, execution: Execution) -> anyhow::Result<()> {
    let outcomes = run_suite(&null_config(&args.null), execution)?;
    println!(
        "{:<22} {:>2} {:>3} {:>10} {:>10} {:>8} {:>8}  result",
        "scheme", "N", "c", "monte", "exact", "P>=t", "P>t"
    );
    let mut failed = 0;
    for o in &outcomes {
        if !o.passed {
            failed += 1;
        }
        println!(
            "{:<22} {:>2} {:>3} {:>10.4} {:>10.4} {:>8.4} {:>8.4}  {}",
            o.case.label,
            o.case.years,
            o.case.candidates,
            o.monte_carlo,
            o.exact,
            o.tail_at_least.max(0.0),
            o.tail_above.max(0.0),
            if o.passed { "pass" } else { "FAIL" }
        );
    }
    println!(
        "{} of {} cases within ±{ORACLE_TOLERANCE}",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        bail!("{failed} oracle cases outside tolerance");
    }
    Ok(())
}

fn calibrate(args: &CalibrateArgs, execution: Execution) -> anyhow::Result<()> {
    let setup = CalibrationSetup {
        countries: args.countries,
        start: args.start,
        end: args.end,
        window_size: args.window,
        replicates: args.replicates,
        seed: args.null.seed,
        detect: DetectConfig {
            null: null_config(&args.null),
            bonferroni: false,
            execution,
        },
    };
    setup.detect.null.validate()?;
    if let Some(dir) = &args.write_data {
        replicate_dataset(&setup, 0)?.write(dir)?;
        println!("wrote synthetic dataset to {}", dir.display());
    }
    let started = Instant::now();
    let report = run_calibration(&setup)?;
    println!(
        "significant: {} of {} pair-windows ({:.2}%, nominal {:.2}%)",
        report.significant,
        report.pair_windows,
        100.0 * report.significance_rate(),
        100.0 * args.null.alpha
    );
    println!(
        "collusive: {} of {} unordered pair-windows ({:.3}%)",
        report.collusive,
        report.unordered_pair_windows,
        100.0 * report.collusion_rate()
    );
    println!("elapsed {:.1?}", started.elapsed());
    Ok(())
}

fn replay(args: ReplayArgs, execution: Execution) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read {}", args.config.display()))?;
    let mut config: RunConfig = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a run config", args.config.display()))?;
    if let Some(data) = args.data {
        config.data_dir = data;
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    run(&config, execution)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execution(cli.workers).and_then(|exec| match cli.command {
        None => RunConfig::from_args(cli.run).and_then(|config| run(&config, exec)),
        Some(Command::VerifyOracle(args)) => verify_oracle(&args, exec),
        Some(Command::Calibrate(args)) => calibrate(&args, exec),
        Some(Command::Replay(args)) => replay(args, exec),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("escbias: error: {message}");
            ExitCode::FAILURE
        }
    }
}
