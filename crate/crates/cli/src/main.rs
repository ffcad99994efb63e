//! Command-line surface for the exponentiality tests: run a test on data,
//! simulate critical values and powers, compute local efficiencies, emit
//! most-favorable alternative densities, and reproduce the reference tables.

mod input;
mod render;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use exptest::montecarlo::{
    critical_values, simulate_power, MonteCarloConfig, PValueMethod,
};
use exptest::tables::{mc_tables, McTablesConfig};
use exptest::{
    bahadur, AlternativeFamily, AlternativeSpec, LaoDensity, StatisticKind, TestFamily,
    TestResult, TupleStrategy,
};
use render::Format;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_ALPHAS: [f64; 5] = [0.1, 0.05, 0.025, 0.01, 0.005];

#[derive(Parser)]
#[command(
    name = "exptest",
    version,
    about = "Scale-free exponentiality tests based on the max-versus-weighted-sum characterization"
)]
struct Cli {
    /// Worker threads for simulation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a data file for exponentiality.
    Test(TestArgs),
    /// Simulate null critical values for a statistic.
    Critvals(CritvalsArgs),
    /// Simulate the power of a test against an alternative.
    Power(PowerArgs),
    /// Local Bahadur efficiencies (optionally scanning k).
    Efficiency(EfficiencyArgs),
    /// Emit a most-favorable alternative density as a sampled curve.
    Lao(LaoArgs),
    /// Reproduce the reference tables with per-cell deltas.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Integral,
    Kolmogorov,
}

impl KindArg {
    fn family(self) -> TestFamily {
        match self {
            KindArg::Integral => TestFamily::Integral,
            KindArg::Kolmogorov => TestFamily::Kolmogorov,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Makeham,
    Weibull,
    Gamma,
    Emnw,
}

impl FamilyArg {
    fn family(self, beta: f64) -> AlternativeFamily {
        match self {
            FamilyArg::Makeham => AlternativeFamily::Makeham,
            FamilyArg::Weibull => AlternativeFamily::Weibull,
            FamilyArg::Gamma => AlternativeFamily::Gamma,
            FamilyArg::Emnw => AlternativeFamily::Emnw { beta },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Normal limit of sqrt(n) I_n (integral family only).
    Asymptotic,
    /// Rank among fresh null simulations.
    Montecarlo,
    /// Statistic only, no p-value.
    None,
}

#[derive(Args)]
struct StrategyArgs {
    /// Tuple budget for exact enumeration.
    #[arg(long, default_value_t = exptest::sample::DEFAULT_TUPLE_BUDGET)]
    budget: u64,
    /// Sample this many index tuples instead of enumerating exactly.
    #[arg(long)]
    tuples: Option<u64>,
}

impl StrategyArgs {
    fn strategy(&self, seed: u64) -> TupleStrategy {
        match self.tuples {
            Some(count) => TupleStrategy::sampled(count, seed),
            None => TupleStrategy::Exact {
                budget: self.budget,
            },
        }
    }
}

#[derive(Args)]
struct TestArgs {
    /// Data file: one nonnegative decimal per line (blank lines ignored),
    /// or CSV with --column.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Integral)]
    kind: KindArg,
    #[arg(short, long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Asymptotic)]
    method: MethodArg,
    /// Rejection levels; the first one drives the exit code.
    #[arg(long = "alpha", value_delimiter = ',', num_args = 1..)]
    alphas: Option<Vec<f64>>,
    /// Replicates for the Monte Carlo p-value.
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// 1-based CSV column to read.
    #[arg(long)]
    column: Option<usize>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CritvalsArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Kolmogorov)]
    kind: KindArg,
    /// Use the U-statistic companion of the integral statistic.
    #[arg(long = "u-statistic", default_value_t = false)]
    u_statistic: bool,
    #[arg(short, long, default_value_t = 2)]
    k: u32,
    #[arg(short, long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "alpha", value_delimiter = ',', num_args = 1..)]
    alphas: Option<Vec<f64>>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Integral)]
    kind: KindArg,
    /// Use the U-statistic companion of the integral statistic.
    #[arg(long = "u-statistic", default_value_t = false)]
    u_statistic: bool,
    #[arg(short, long, default_value_t = 2)]
    k: u32,
    #[arg(short, long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    theta: f64,
    /// Beta parameter of the EMNW family.
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    #[arg(long = "alpha", value_delimiter = ',', num_args = 1..)]
    alphas: Option<Vec<f64>>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct EfficiencyArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Integral)]
    kind: KindArg,
    #[arg(short, long, default_value_t = 2)]
    k: u32,
    /// Restrict to one family (default: all four).
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    /// Scan k in [2, k-max] and report the best order per family.
    #[arg(long)]
    scan: bool,
    #[arg(long = "k-max", default_value_t = 20)]
    k_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct LaoArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Integral)]
    kind: KindArg,
    #[arg(short, long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    theta: f64,
    #[arg(long = "x-max", default_value_t = 12.0)]
    x_max: f64,
    #[arg(long, default_value_t = 600)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichTables {
    EfficiencyIntegral,
    EfficiencyKolmogorov,
    BestK,
    Critvals,
    Power,
    All,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum, default_value_t = WhichTables::All)]
    which: WhichTables,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = McTablesConfig::default().seed)]
    seed: u64,
    #[arg(short, long, default_value_t = 100)]
    n: usize,
    /// Sampled tuples per replicate for the k = 4 rows.
    #[arg(long = "k4-tuples", default_value_t = McTablesConfig::default().k4_tuples)]
    k4_tuples: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {err}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Critvals(args) => cmd_critvals(args).map(|_| ExitCode::SUCCESS),
        Command::Power(args) => cmd_power(args).map(|_| ExitCode::SUCCESS),
        Command::Efficiency(args) => cmd_efficiency(args).map(|_| ExitCode::SUCCESS),
        Command::Lao(args) => cmd_lao(args).map(|_| ExitCode::SUCCESS),
        Command::Tables(args) => cmd_tables(args).map(|_| ExitCode::SUCCESS),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug, Serialize)]
struct Decision {
    alpha: f64,
    reject: bool,
}

#[derive(Debug, Serialize)]
struct TestOutput {
    result: TestResult,
    decisions: Vec<Decision>,
}

fn cmd_test(args: TestArgs) -> Result<ExitCode> {
    let sample = input::read_sample(&args.file, args.column)?;
    let kind = StatisticKind::new(args.kind.family(), args.k)?;
    let strategy = args.strategy.strategy(args.seed);
    let method = match args.method {
        MethodArg::None => None,
        MethodArg::Asymptotic => Some(PValueMethod::AsymptoticNormal),
        MethodArg::Montecarlo => Some(PValueMethod::MonteCarlo {
            replicates: args.reps,
            seed: args.seed,
            tuple_strategy: strategy,
        }),
    };
    let result = exptest::montecarlo::run_test(&sample, kind, &strategy, method.as_ref())?;
    let alphas = args.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let decisions: Vec<Decision> = match result.p_value {
        Some(p) => alphas
            .iter()
            .map(|&alpha| Decision {
                alpha,
                reject: p <= alpha,
            })
            .collect(),
        None => Vec::new(),
    };
    let output = TestOutput { result, decisions };
    match args.format {
        Format::Json => render::print_json(&output)?,
        Format::Csv => {
            println!("statistic,k,n,value,p_value,alpha,reject");
            let p = output
                .result
                .p_value
                .map_or(String::new(), |p| format!("{p}"));
            if output.decisions.is_empty() {
                println!(
                    "{},{},{},{},{p},,",
                    output.result.kind.family, output.result.kind.k, output.result.n,
                    output.result.value
                );
            }
            for d in &output.decisions {
                println!(
                    "{},{},{},{},{p},{},{}",
                    output.result.kind.family,
                    output.result.kind.k,
                    output.result.n,
                    output.result.value,
                    d.alpha,
                    d.reject
                );
            }
        }
        Format::Text => {
            println!("statistic: {}", output.result.kind);
            println!("n: {}", output.result.n);
            println!("value: {:.6}", output.result.value);
            match output.result.p_value {
                Some(p) => println!("p-value: {p:.6} ({:?})", output.result.p_method),
                None => println!("p-value: none requested"),
            }
            for d in &output.decisions {
                println!(
                    "alpha {:>6.3}: {}",
                    d.alpha,
                    if d.reject { "reject" } else { "fail-to-reject" }
                );
            }
        }
    }
    if output.decisions.first().is_some_and(|d| d.reject) {
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_critvals(args: CritvalsArgs) -> Result<()> {
    let kind = StatisticKind::new(args.kind.family(), args.k)?;
    let config = MonteCarloConfig {
        kind,
        n: args.n,
        replicates: args.reps,
        seed: args.seed,
        tuple_strategy: args.strategy.strategy(args.seed),
        alternative: None,
        u_statistic: args.u_statistic,
    };
    let alphas = args.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let table = critical_values(&config, &alphas)?;
    match args.format {
        Format::Json => render::print_json(&table)?,
        Format::Csv => {
            println!("kind,k,n,replicates,seed,alpha,critical_value");
            for (alpha, value) in &table.entries {
                println!(
                    "{},{},{},{},{},{alpha},{value}",
                    table.kind.family, table.kind.k, table.n, table.replicates, table.seed
                );
            }
        }
        Format::Text => {
            println!(
                "critical values: {} n={} replicates={} seed={}",
                table.kind, table.n, table.replicates, table.seed
            );
            for (alpha, value) in &table.entries {
                println!("alpha {alpha:>6.3}: {value:.6}");
            }
        }
    }
    Ok(())
}

fn cmd_power(args: PowerArgs) -> Result<()> {
    let kind = StatisticKind::new(args.kind.family(), args.k)?;
    let family = args.family.family(args.beta);
    let spec = AlternativeSpec::new(family, args.theta)?;
    let strategy = args.strategy.strategy(args.seed);
    let alphas = args.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());

    let null_config = MonteCarloConfig {
        kind,
        n: args.n,
        replicates: args.reps,
        seed: args.seed,
        tuple_strategy: strategy,
        alternative: None,
        u_statistic: args.u_statistic,
    };
    let critvals = critical_values(&null_config, &alphas)?;
    let alt_config = MonteCarloConfig {
        alternative: Some(spec),
        seed: exptest::rng::derive(args.seed, 0xA17),
        ..null_config
    };
    let estimates: Vec<_> = critvals
        .entries
        .iter()
        .map(|&(alpha, critical)| simulate_power(&alt_config, alpha, critical))
        .collect::<exptest::Result<_>>()?;
    match args.format {
        Format::Json => render::print_json(&estimates)?,
        Format::Csv => {
            println!("kind,k,n,family,theta,alpha,critical_value,power,mc_std_error");
            for e in &estimates {
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    e.kind.family,
                    e.kind.k,
                    e.n,
                    e.alternative.family,
                    e.alternative.theta,
                    e.alpha,
                    e.critical_value_used,
                    e.rejection_rate,
                    e.mc_std_error
                );
            }
        }
        Format::Text => {
            println!(
                "power: {} n={} under {} theta={} ({} replicates)",
                kind, args.n, family, args.theta, args.reps
            );
            for e in &estimates {
                println!(
                    "alpha {:>6.3}: power {:.4} (critical {:.6}, mc se {:.4})",
                    e.alpha, e.rejection_rate, e.critical_value_used, e.mc_std_error
                );
            }
        }
    }
    Ok(())
}

fn cmd_efficiency(args: EfficiencyArgs) -> Result<()> {
    let families: Vec<AlternativeFamily> = match args.family {
        Some(f) => vec![f.family(args.beta)],
        None => vec![
            AlternativeFamily::Makeham,
            AlternativeFamily::Weibull,
            AlternativeFamily::Gamma,
            AlternativeFamily::Emnw { beta: args.beta },
        ],
    };
    if args.scan {
        #[derive(Serialize)]
        struct ScanRow {
            family: AlternativeFamily,
            best_k: u32,
            efficiency: f64,
        }
        let rows: Vec<ScanRow> = families
            .iter()
            .map(|&family| {
                bahadur::best_k_scan(args.kind.family(), family, 2, args.k_max)
                    .map(|(best_k, efficiency)| ScanRow {
                        family,
                        best_k,
                        efficiency,
                    })
            })
            .collect::<exptest::Result<_>>()?;
        match args.format {
            Format::Json => render::print_json(&rows)?,
            Format::Csv => {
                println!("family,best_k,efficiency");
                for r in &rows {
                    println!("{},{},{}", r.family, r.best_k, r.efficiency);
                }
            }
            Format::Text => {
                println!(
                    "best k in [2, {}] for the {} statistic",
                    args.k_max,
                    args.kind.family()
                );
                for r in &rows {
                    println!("{:12} k* = {:2}  efficiency {:.4}", r.family.to_string(), r.best_k, r.efficiency);
                }
            }
        }
        return Ok(());
    }
    let kind = StatisticKind::new(args.kind.family(), args.k)?;
    let reports: Vec<_> = families
        .iter()
        .map(|&family| bahadur::local_efficiency(kind, family))
        .collect::<exptest::Result<_>>()?;
    match args.format {
        Format::Json => render::print_json(&reports)?,
        Format::Csv => {
            println!("kind,k,family,efficiency,slope_curvature,kl_curvature,b_coefficient,witness_t");
            for r in &reports {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    r.kind.family,
                    r.kind.k,
                    r.family.map_or(String::new(), |f| f.to_string()),
                    r.efficiency,
                    r.slope_curvature,
                    r.kl_curvature,
                    r.b_coefficient,
                    r.witness_t.map_or(String::new(), |t| t.to_string()),
                );
            }
        }
        Format::Text => {
            println!("local Bahadur efficiency of {kind}");
            for r in &reports {
                let family = r.family.map_or("custom".to_string(), |f| f.to_string());
                let witness = r
                    .witness_t
                    .map_or(String::new(), |t| format!("  t* = {t:.3}"));
                println!(
                    "{family:12} eff {:.4}  (slope {:.5}, 2K {:.5}, b {:.5}){witness}",
                    r.efficiency, r.slope_curvature, r.kl_curvature, r.b_coefficient
                );
            }
        }
    }
    Ok(())
}

fn cmd_lao(args: LaoArgs) -> Result<()> {
    let kind = StatisticKind::new(args.kind.family(), args.k)?;
    let lao = LaoDensity::new(kind, args.theta)?;
    if args.points < 2 {
        return Err(anyhow!("need at least 2 points"));
    }
    #[derive(Serialize)]
    struct Curve {
        kind: StatisticKind,
        theta: f64,
        max_theta: f64,
        witness_t: Option<f64>,
        points: Vec<(f64, f64)>,
    }
    let points: Vec<(f64, f64)> = (0..args.points)
        .map(|i| {
            let x = args.x_max * i as f64 / (args.points - 1) as f64;
            (x, lao.eval(x))
        })
        .collect();
    match args.format {
        Format::Json => render::print_json(&Curve {
            kind,
            theta: args.theta,
            max_theta: lao.max_theta(),
            witness_t: lao.witness_t(),
            points,
        })?,
        _ => {
            println!("x,density");
            for (x, g) in points {
                println!("{x},{g}");
            }
        }
    }
    Ok(())
}

fn cmd_tables(args: TablesArgs) -> Result<()> {
    use exptest::tables::{
        best_k_table, integral_efficiency_table, kolmogorov_efficiency_table,
    };
    let mut reports = Vec::new();
    match args.which {
        WhichTables::EfficiencyIntegral => {
            reports.push(integral_efficiency_table(2)?);
            reports.push(integral_efficiency_table(3)?);
            reports.push(best_k_table()?);
        }
        WhichTables::EfficiencyKolmogorov => {
            reports.push(kolmogorov_efficiency_table(2)?);
            reports.push(kolmogorov_efficiency_table(3)?);
        }
        WhichTables::BestK => reports.push(best_k_table()?),
        WhichTables::Critvals | WhichTables::Power | WhichTables::All => {
            if matches!(args.which, WhichTables::All) {
                reports.push(integral_efficiency_table(2)?);
                reports.push(integral_efficiency_table(3)?);
                reports.push(best_k_table()?);
                reports.push(kolmogorov_efficiency_table(2)?);
                reports.push(kolmogorov_efficiency_table(3)?);
            }
            let cfg = McTablesConfig {
                seed: args.seed,
                k4_tuples: args.k4_tuples,
                n: args.n,
                ..McTablesConfig::with_replicates(args.reps)
            };
            let include_powers = !matches!(args.which, WhichTables::Critvals);
            let mc = mc_tables(&cfg, include_powers)?;
            reports.push(mc.critical_values);
            reports.push(mc.size);
            if include_powers {
                reports.push(mc.integral_power);
                reports.push(mc.kolmogorov_power);
            }
        }
    }
    let refs: Vec<&exptest::tables::TableReport> = reports.iter().collect();
    render::tables(args.format, &refs)
}
