//! Command-line front end: estimation, grid transport, convergence sweeps,
//! bound checks, scaling benches, and oracle cross-checks.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gridot::harness::{
    bench_scaling, discretization_sweep, nonsmooth_bound_check, quantization_slack_w2sq,
    run_csr_experiment, solve_grid_pair, summarize, write_records_csv, CsrConfig,
    ExperimentRecord, ExperimentSummary,
};
use gridot::measures::ProductDensity;
use gridot::oracle::{ot_cycle_cancel_grid, ot_enumerate_grid};
use gridot::sketch::GridHistogram;

#[derive(Parser)]
#[command(name = "gridot", version, about = "Squared 2-Wasserstein estimation on (0,1)^d via grid sketching and exact min-cost flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample-sketch-solve estimation between two distributions.
    Estimate(EstimateArgs),
    /// Exact W₂² between two grid histogram files.
    GridOt(GridOtArgs),
    /// Deterministic discretization-error sweep over a list of L values.
    Convergence(ConvergenceArgs),
    /// Check the distribution-free √-scale bound 2√d·h at each L.
    NonsmoothCheck(NonsmoothArgs),
    /// Runtime scaling bench on random histograms.
    Bench(BenchArgs),
    /// Cross-check a histogram pair against the small-instance oracles.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct DistPair {
    /// Distribution JSON for P: inline `{"d":…,"factors":[…]}` or a file path.
    #[arg(long)]
    dist_p: String,
    /// Distribution JSON for Q: inline JSON or a file path.
    #[arg(long)]
    dist_q: String,
}

impl DistPair {
    fn load(&self) -> Result<(ProductDensity, ProductDensity)> {
        Ok((load_distribution(&self.dist_p)?, load_distribution(&self.dist_q)?))
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    pair: DistPair,
    #[arg(long)]
    epsilon: f64,
    /// Smoothness exponent for the grid schedule, in (0,1].
    #[arg(long)]
    alpha: f64,
    #[arg(long, short = 'd')]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long = "c-n", default_value_t = 1.0)]
    c_n: f64,
    #[arg(long = "c-l", default_value_t = 1.0)]
    c_l: f64,
    /// Omit wall-time columns so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Write records to this path (.csv → CSV, otherwise JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridOtArgs {
    /// Histogram JSON file for P.
    #[arg(long)]
    hist_p: PathBuf,
    /// Histogram JSON file for Q.
    #[arg(long)]
    hist_q: PathBuf,
    /// Write the scaled integral instance in DIMACS min-cost-flow format.
    #[arg(long)]
    emit_dimacs: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    pair: DistPair,
    /// Ascending comma-separated grid sizes, e.g. 4,8,16,32.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    l_list: Vec<u32>,
    #[arg(long, default_value_t = 100_000_000)]
    k_quant: u64,
    #[arg(long)]
    no_timing: bool,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NonsmoothArgs {
    #[command(flatten)]
    pair: DistPair,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    l_list: Vec<u32>,
    #[arg(long, default_value_t = 100_000_000)]
    k_quant: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, short = 'd', default_value_t = 2)]
    d: usize,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    l_list: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path for the per-L rows.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    hist_p: PathBuf,
    #[arg(long)]
    hist_q: PathBuf,
}

fn load_distribution(spec: &str) -> Result<ProductDensity> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).with_context(|| format!("reading distribution file {spec}"))?
    };
    ProductDensity::from_json(&text).with_context(|| "parsing distribution JSON".to_string())
}

fn load_histogram(path: &Path) -> Result<GridHistogram> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading histogram {}", path.display()))?;
    GridHistogram::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_records(path: &Path, records: &[ExperimentRecord], summary: &ExperimentSummary) -> Result<()> {
    if path.extension().map(|e| e == "csv").unwrap_or(false) {
        let file = fs::File::create(path)?;
        write_records_csv(file, records)?;
    } else {
        let doc = serde_json::json!({ "records": records, "summary": summary });
        fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Estimate(args) => estimate(args),
        Command::GridOt(args) => grid_ot(args),
        Command::Convergence(args) => convergence(args),
        Command::NonsmoothCheck(args) => nonsmooth(args),
        Command::Bench(args) => bench(args),
        Command::Oracle(args) => oracle(args),
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let (p, q) = args.pair.load()?;
    let cfg = CsrConfig {
        epsilon: args.epsilon,
        alpha: args.alpha,
        d: args.d,
        c_n: args.c_n,
        c_l: args.c_l,
        seed: args.seed,
        trials: args.trials,
    };
    let records = run_csr_experiment(&p, &q, &cfg, !args.no_timing)?;
    let summary = summarize(&records);
    if let Some(path) = &args.out {
        write_records(path, &records, &summary)?;
    }
    let doc = serde_json::json!({
        "n": cfg.derived_n(),
        "L": cfg.derived_l(),
        "records": records,
        "summary": summary,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn grid_ot(args: GridOtArgs) -> Result<()> {
    let hp = load_histogram(&args.hist_p)?;
    let hq = load_histogram(&args.hist_q)?;
    let outcome = solve_grid_pair(&hp, &hq)?;
    if let Some(path) = &args.emit_dimacs {
        fs::write(path, outcome.network.to_dimacs())?;
    }
    let doc = serde_json::json!({
        "w2sq": outcome.estimate,
        "opt_int": outcome.solution.opt_cost,
        "k": hp.k(),
        "L": hp.grid().l(),
        "d": hp.grid().d(),
        "nodes": outcome.network.num_nodes(),
        "arcs": outcome.network.num_arcs(),
        "build_secs": outcome.build_secs,
        "solve_secs": outcome.solve_secs,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn convergence(args: ConvergenceArgs) -> Result<()> {
    let (p, q) = args.pair.load()?;
    let records = discretization_sweep(&p, &q, &args.l_list, args.k_quant, !args.no_timing)?;
    let summary = summarize(&records);
    match &args.out {
        Some(path) => write_records(path, &records, &summary)?,
        None => write_records_csv(std::io::stdout().lock(), &records)?,
    }
    Ok(())
}

fn nonsmooth(args: NonsmoothArgs) -> Result<()> {
    let (p, q) = args.pair.load()?;
    let mut all_ok = true;
    for &l in &args.l_list {
        let ok = nonsmooth_bound_check(&p, &q, l, args.k_quant)?;
        let bound = 2.0 * (p.d() as f64).sqrt() / l as f64
            + quantization_slack_w2sq(p.d(), l, args.k_quant).sqrt();
        println!(
            "L={l} bound={bound:.6} {}",
            if ok { "PASS" } else { "FAIL" }
        );
        all_ok &= ok;
    }
    if !all_ok {
        bail!("bound violated at one or more grid sizes");
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let report = bench_scaling(args.d, &args.l_list, args.k, args.seed)?;
    if let Some(path) = &args.out {
        let mut w = csv::Writer::from_path(path)?;
        for row in &report.rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let hp = load_histogram(&args.hist_p)?;
    let hq = load_histogram(&args.hist_q)?;
    let outcome = solve_grid_pair(&hp, &hq)?;
    let tableau = ot_cycle_cancel_grid(&hp, &hq)?;
    let enumerated = if hp.k() <= 8 {
        Some(ot_enumerate_grid(&hp, &hq)?)
    } else {
        None
    };
    let agree = tableau == outcome.solution.opt_cost as i128
        && enumerated.map_or(true, |e| e == tableau);
    let doc = serde_json::json!({
        "pipeline_opt_int": outcome.solution.opt_cost,
        "tableau_opt_int": tableau.to_string(),
        "enumerate_opt_int": enumerated.map(|e| e.to_string()),
        "w2sq": outcome.estimate,
        "agree": agree,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    if !agree {
        bail!("oracle disagreement: the pipeline does not match the reference");
    }
    Ok(())
}
