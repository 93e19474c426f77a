//! End-to-end estimation and experiments: the sample→sketch→solve estimator
//! with its n/L schedule, discretization sweeps, the non-smooth bound check,
//! runtime scaling benches, and CSV/JSON persistence.
//!
//! Determinism contract: trials run concurrently with independent generator
//! states derived from (seed, stream) by a splittable scheme, records are
//! ordered by trial id regardless of completion order, and with timing
//! disabled two runs of the same config produce byte-identical CSV.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowgraph::{build_partite, descale, FlowNetwork};
use crate::mcf::{optimality_violations, solve_mcf, FlowSolution};
use crate::measures::{ref_w2sq_product, Factor1D, ProductDensity};
use crate::sketch::{sketch_analytic, sketch_sample, GridHistogram, GridSpec};

/// Configuration of one ε-accuracy estimation experiment.
///
/// The schedule constants default to 1.0; the committed values used by the
/// acceptance experiment live in `config/acceptance_csr.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrConfig {
    pub epsilon: f64,
    /// Smoothness exponent driving the grid schedule, in (0,1].
    pub alpha: f64,
    pub d: usize,
    #[serde(default = "default_constant")]
    pub c_n: f64,
    #[serde(default = "default_constant")]
    pub c_l: f64,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
}

fn default_constant() -> f64 {
    1.0
}

fn default_trials() -> u32 {
    20
}

impl CsrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter("alpha must be in (0,1]".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(self.c_n > 0.0 && self.c_l > 0.0) {
            return Err(Error::InvalidParameter("schedule constants must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        Ok(())
    }

    /// Sample size n = ⌈c_n · ε^{−max(2, d/2)}⌉.
    pub fn derived_n(&self) -> u64 {
        let expo = 2f64.max(self.d as f64 / 2.0);
        ((self.c_n * self.epsilon.powf(-expo)).ceil() as u64).max(1)
    }

    /// Grid divisions L = ⌈c_L · ε^{−1/(1+α)}⌉ (edge length h = 1/L).
    pub fn derived_l(&self) -> u32 {
        let expo = 1.0 / (1.0 + self.alpha);
        ((self.c_l * self.epsilon.powf(-expo)).ceil() as u32).max(1)
    }
}

/// One persisted experiment row; CSV columns are exactly these fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub epsilon: f64,
    pub n: u64,
    #[serde(rename = "L")]
    pub l: u32,
    pub estimate: f64,
    pub reference: Option<f64>,
    pub abs_error: Option<f64>,
    pub wall_time_build: Option<f64>,
    pub wall_time_solve: Option<f64>,
    pub wall_time_sample: Option<f64>,
    pub seed: u64,
    pub trial: u32,
}

/// Splittable per-trial generator: (seed, stream) → independent ChaCha state
/// through a splitmix64 key expansion.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    fn splitmix64(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = seed ^ stream.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A solved grid transport instance with its certificate and timings.
pub struct GridSolveOutcome {
    pub estimate: f64,
    pub network: FlowNetwork,
    pub solution: FlowSolution,
    pub build_secs: f64,
    pub solve_secs: f64,
}

/// Builds, solves, audits, and descales one histogram pair.
pub fn solve_grid_pair(hp: &GridHistogram, hq: &GridHistogram) -> Result<GridSolveOutcome> {
    let t0 = Instant::now();
    let network = build_partite(hp, hq)?;
    let build_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let solution = solve_mcf(&network)?;
    let solve_secs = t1.elapsed().as_secs_f64();
    let violations = optimality_violations(&network, &solution);
    if !violations.is_empty() {
        return Err(Error::Internal(format!(
            "solver returned an uncertified solution: {}",
            violations.join("; ")
        )));
    }
    let estimate = descale(solution.opt_cost, hp.k(), hp.grid().l())?;
    Ok(GridSolveOutcome { estimate, network, solution, build_secs, solve_secs })
}

/// One sample→sketch→solve trial of the ε-schedule estimator.
///
/// Draws n points from each distribution with generator streams
/// (seed, 2·trial) and (seed, 2·trial+1), sketches at k = n, and solves
/// exactly. `reference` is attached when the caller has one; timings are
/// omitted when `timing` is false so output bytes stay reproducible.
pub fn csr_trial(
    p: &ProductDensity,
    q: &ProductDensity,
    cfg: &CsrConfig,
    trial: u32,
    reference: Option<f64>,
    timing: bool,
) -> Result<ExperimentRecord> {
    cfg.validate()?;
    if p.d() != cfg.d || q.d() != cfg.d {
        return Err(Error::Mismatch(format!(
            "config d={} but distributions have d={} and d={}",
            cfg.d,
            p.d(),
            q.d()
        )));
    }
    let n = cfg.derived_n();
    let l = cfg.derived_l();
    let grid = GridSpec::new(cfg.d, l)?;

    let t0 = Instant::now();
    let mut rng_p = trial_rng(cfg.seed, 2 * trial as u64);
    let mut rng_q = trial_rng(cfg.seed, 2 * trial as u64 + 1);
    let pts_p = p.sample(&mut rng_p, n as usize)?;
    let pts_q = q.sample(&mut rng_q, n as usize)?;
    let sample_secs = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let hp = sketch_sample(grid, &pts_p)?;
    let hq = sketch_sample(grid, &pts_q)?;
    let sketch_secs = t1.elapsed().as_secs_f64();

    let outcome = solve_grid_pair(&hp, &hq)?;
    Ok(ExperimentRecord {
        epsilon: cfg.epsilon,
        n,
        l,
        estimate: outcome.estimate,
        reference,
        abs_error: reference.map(|r| (outcome.estimate - r).abs()),
        wall_time_build: timing.then_some(sketch_secs + outcome.build_secs),
        wall_time_solve: timing.then_some(outcome.solve_secs),
        wall_time_sample: timing.then_some(sample_secs),
        seed: cfg.seed,
        trial,
    })
}

/// Single-trial estimator with the product-oracle reference attached.
pub fn csr_estimate(
    p: &ProductDensity,
    q: &ProductDensity,
    cfg: &CsrConfig,
) -> Result<ExperimentRecord> {
    let reference = ref_w2sq_product(p, q)?;
    csr_trial(p, q, cfg, 0, Some(reference), true)
}

/// Runs all configured trials concurrently; records come back in trial order.
pub fn run_csr_experiment(
    p: &ProductDensity,
    q: &ProductDensity,
    cfg: &CsrConfig,
    timing: bool,
) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let reference = Some(ref_w2sq_product(p, q)?);
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| csr_trial(p, q, cfg, t, reference, timing))
        .collect()
}

/// Mean/standard-error summary over an experiment's trials.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub trials: u32,
    pub mean_estimate: f64,
    pub std_error_estimate: f64,
    pub reference: Option<f64>,
    pub mean_abs_error: Option<f64>,
    pub std_error_abs_error: Option<f64>,
}

pub fn summarize(records: &[ExperimentRecord]) -> ExperimentSummary {
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.estimate).sum::<f64>() / n;
    let var = records.iter().map(|r| (r.estimate - mean).powi(2)).sum::<f64>()
        / (n - 1.0).max(1.0);
    let errs: Vec<f64> = records.iter().filter_map(|r| r.abs_error).collect();
    let (mean_abs, se_abs) = if errs.len() == records.len() && !errs.is_empty() {
        let m = errs.iter().sum::<f64>() / n;
        let v = errs.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (Some(m), Some((v / n).sqrt()))
    } else {
        (None, None)
    };
    ExperimentSummary {
        trials: records.len() as u32,
        mean_estimate: mean,
        std_error_estimate: (var / n).sqrt(),
        reference: records.first().and_then(|r| r.reference),
        mean_abs_error: mean_abs,
        std_error_abs_error: se_abs,
    }
}

/// Deterministic discretization sweep: analytic sketches of both measures at
/// each L, solved exactly and compared to the quantile-quadrature reference.
/// The record's `epsilon` column carries the edge length h = 1/L and `n`
/// carries the quantization total k_quant.
pub fn discretization_sweep(
    p: &ProductDensity,
    q: &ProductDensity,
    l_list: &[u32],
    k_quant: u64,
    timing: bool,
) -> Result<Vec<ExperimentRecord>> {
    if l_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("L list must be strictly ascending".into()));
    }
    let reference = ref_w2sq_product(p, q)?;
    let mut records = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let grid = GridSpec::new(p.d(), l)?;
        let t0 = Instant::now();
        let hp = sketch_analytic(grid, p, k_quant)?;
        let hq = sketch_analytic(grid, q, k_quant)?;
        let sketch_secs = t0.elapsed().as_secs_f64();
        let outcome = solve_grid_pair(&hp, &hq)?;
        records.push(ExperimentRecord {
            epsilon: grid.h(),
            n: k_quant,
            l,
            estimate: outcome.estimate,
            reference: Some(reference),
            abs_error: Some((outcome.estimate - reference).abs()),
            wall_time_build: timing.then_some(sketch_secs + outcome.build_secs),
            wall_time_solve: timing.then_some(outcome.solve_secs),
            wall_time_sample: timing.then_some(0.0),
            seed: 0,
            trial: 0,
        });
    }
    Ok(records)
}

/// Worst-case W₂² perturbation from largest-remainder quantization: per-cell
/// mass moves by at most 1/k, total variation per measure at most
/// L^d/(2k), and each moved unit costs at most the squared diameter d.
pub fn quantization_slack_w2sq(d: usize, l: u32, k_quant: u64) -> f64 {
    let cells = (l as f64).powi(d as i32);
    d as f64 * cells / k_quant as f64
}

/// Checks the distribution-free bound |W₂(sketch) − W₂(exact)| ≤ 2√d·h,
/// padded by the quantization slack on the √ scale.
pub fn nonsmooth_bound_check(
    p: &ProductDensity,
    q: &ProductDensity,
    l: u32,
    k_quant: u64,
) -> Result<bool> {
    let grid = GridSpec::new(p.d(), l)?;
    let hp = sketch_analytic(grid, p, k_quant)?;
    let hq = sketch_analytic(grid, q, k_quant)?;
    let outcome = solve_grid_pair(&hp, &hq)?;
    let reference = ref_w2sq_product(p, q)?;
    let slack = quantization_slack_w2sq(p.d(), l, k_quant).sqrt();
    let bound = 2.0 * (p.d() as f64).sqrt() * grid.h() + slack;
    Ok((outcome.estimate.sqrt() - reference.sqrt()).abs() <= bound)
}

/// One row of the runtime-scaling bench.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    #[serde(rename = "L")]
    pub l: u32,
    pub nodes: usize,
    pub arcs: usize,
    pub build_secs: f64,
    pub solve_secs: f64,
    pub opt_cost: i64,
}

/// Bench output: per-L rows plus the fitted log-log exponent of solve time.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub d: usize,
    pub k: u64,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of ln(solve_secs) against ln(L); reported for the
    /// record, never gated.
    pub fitted_time_exponent: Option<f64>,
}

/// Random-histogram scaling bench over ascending L.
pub fn bench_scaling(d: usize, l_list: &[u32], k: u64, seed: u64) -> Result<BenchReport> {
    if l_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("L list must be strictly ascending".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if k > 10_000_000 {
        return Err(Error::InvalidParameter(
            "bench draws k unit masses; keep k <= 10^7".into(),
        ));
    }
    let mut rows = Vec::with_capacity(l_list.len());
    for (i, &l) in l_list.iter().enumerate() {
        let grid = GridSpec::new(d, l)?;
        let mut rng = trial_rng(seed, i as u64);
        let mut random_hist = || {
            let mut counts = vec![0u64; grid.num_cells()];
            for _ in 0..k {
                let c = rand::Rng::gen_range(&mut rng, 0..grid.num_cells());
                counts[c] += 1;
            }
            GridHistogram::from_counts(grid, counts)
        };
        let hp = random_hist()?;
        let hq = random_hist()?;
        let outcome = solve_grid_pair(&hp, &hq)?;
        rows.push(BenchRow {
            l,
            nodes: outcome.network.num_nodes(),
            arcs: outcome.network.num_arcs(),
            build_secs: outcome.build_secs,
            solve_secs: outcome.solve_secs,
            opt_cost: outcome.solution.opt_cost,
        });
    }
    let fitted_time_exponent = fit_loglog_slope(
        &rows.iter().map(|r| r.l as f64).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.solve_secs.max(1e-9)).collect::<Vec<_>>(),
    );
    Ok(BenchReport { d, k, rows, fitted_time_exponent })
}

/// Least-squares slope of ln(y) on ln(x); None below two points.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Writes records as CSV with a mandatory header row.
pub fn write_records_csv<W: std::io::Write>(w: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn records_csv_bytes(records: &[ExperimentRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records)?;
    Ok(buf)
}

pub fn read_records_csv<R: std::io::Read>(r: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in reader.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// The d-dimensional test zoo: products mixing all three factor families.
pub fn distribution_zoo(d: usize) -> Vec<ProductDensity> {
    let cusp_a = Factor1D::holder_cusp(0.5, 0.3, 0.5).expect("valid");
    let cusp_b = Factor1D::holder_cusp(0.3, -0.6, 0.25).expect("valid");
    let sine_a = Factor1D::smooth_sine(0.5, 1).expect("valid");
    let sine_b = Factor1D::smooth_sine(-0.9, 2).expect("valid");
    let singles = [Factor1D::uniform(), cusp_a, cusp_b, sine_a, sine_b];
    match d {
        1 => singles
            .iter()
            .map(|f| ProductDensity::new(vec![f.clone()]).expect("valid"))
            .collect(),
        _ => {
            // A representative set of d-factor products rather than the full
            // cartesian power.
            let picks: [&[usize]; 4] = [&[0, 0], &[1, 0], &[3, 4], &[2, 3]];
            picks
                .iter()
                .map(|axes| {
                    let factors: Vec<Factor1D> = (0..d)
                        .map(|i| singles[axes[i % axes.len()]].clone())
                        .collect();
                    ProductDensity::new(factors).expect("valid")
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ot_1d_sorted;

    fn uniform(d: usize) -> ProductDensity {
        ProductDensity::new(vec![Factor1D::uniform(); d]).unwrap()
    }

    #[test]
    fn schedule_closed_forms() {
        let cfg = CsrConfig {
            epsilon: 0.1,
            alpha: 0.5,
            d: 2,
            c_n: 1.0,
            c_l: 1.0,
            seed: 0,
            trials: 1,
        };
        // n = ceil(0.1^{-2}) = 100, L = ceil(0.1^{-1/1.5}) = ceil(4.64…) = 5.
        assert_eq!(cfg.derived_n(), 100);
        assert_eq!(cfg.derived_l(), 5);

        let cfg3 = CsrConfig { d: 3, alpha: 1.0, epsilon: 0.05, ..cfg.clone() };
        // max(2, 3/2) = 2 → n = 400; L = ceil(20^{1/2}) = 5.
        assert_eq!(cfg3.derived_n(), 400);
        assert_eq!(cfg3.derived_l(), 5);

        let scaled = CsrConfig { c_n: 2.5, c_l: 3.0, ..cfg };
        assert_eq!(scaled.derived_n(), 250);
        assert_eq!(scaled.derived_l(), 14);
    }

    #[test]
    fn identical_distributions_estimate_near_zero() {
        let p = uniform(2);
        let cfg = CsrConfig {
            epsilon: 0.1,
            alpha: 1.0,
            d: 2,
            c_n: 1.0,
            c_l: 1.0,
            seed: 9,
            trials: 4,
        };
        let records = run_csr_experiment(&p, &p, &cfg, false).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.estimate >= 0.0);
            assert!(r.estimate < 0.05, "estimate {} too large for P == Q", r.estimate);
            assert_eq!(r.reference, Some(0.0));
            assert!(r.wall_time_solve.is_none());
        }
    }

    #[test]
    fn one_dim_estimator_tracks_reference() {
        let p = uniform(1);
        let q = ProductDensity::new(vec![Factor1D::smooth_sine(0.5, 1).unwrap()]).unwrap();
        let cfg = CsrConfig {
            epsilon: 0.1,
            alpha: 1.0,
            d: 1,
            c_n: 1.0,
            c_l: 1.0,
            seed: 77,
            trials: 20,
        };
        let records = run_csr_experiment(&p, &q, &cfg, true).unwrap();
        let summary = summarize(&records);
        assert!(
            summary.mean_abs_error.unwrap() <= cfg.epsilon,
            "mean abs error {} above epsilon",
            summary.mean_abs_error.unwrap()
        );
    }

    #[test]
    fn folklore_consistency_bound_d1() {
        // Lemma-style inequality on a shared sample: the grid and sorted
        // estimates must differ by at most 2h(√A+√B) + h².
        let p = ProductDensity::new(vec![Factor1D::holder_cusp(0.5, 0.3, 0.5).unwrap()]).unwrap();
        let q = ProductDensity::new(vec![Factor1D::smooth_sine(-0.9, 2).unwrap()]).unwrap();
        let n = 300usize;
        let l = 15u32;
        let grid = GridSpec::new(1, l).unwrap();
        for trial in 0..5u64 {
            let mut rp = trial_rng(4242, 2 * trial);
            let mut rq = trial_rng(4242, 2 * trial + 1);
            let sp = p.sample(&mut rp, n).unwrap();
            let sq = q.sample(&mut rq, n).unwrap();
            let hp = sketch_sample(grid, &sp).unwrap();
            let hq = sketch_sample(grid, &sq).unwrap();
            let grid_est = solve_grid_pair(&hp, &hq).unwrap().estimate;
            let sorted_est = ot_1d_sorted(&sp.axis(0), &sq.axis(0)).unwrap();
            let h = grid.h();
            let bound = 2.0 * h * (grid_est.sqrt() + sorted_est.sqrt()) + h * h;
            assert!(
                (grid_est - sorted_est).abs() <= bound,
                "trial {trial}: |{grid_est} − {sorted_est}| > {bound}"
            );
        }
    }

    #[test]
    fn sweep_is_deterministic_and_referenced() {
        let p = ProductDensity::new(vec![
            Factor1D::holder_cusp(0.5, 0.3, 0.5).unwrap(),
            Factor1D::uniform(),
        ])
        .unwrap();
        let q = uniform(2);
        let a = discretization_sweep(&p, &q, &[2, 4], 10_000, false).unwrap();
        let b = discretization_sweep(&p, &q, &[2, 4], 10_000, false).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a[0].reference.unwrap() > 0.0);
        assert!((a[0].epsilon - 0.5).abs() < 1e-15);
        assert!(discretization_sweep(&p, &q, &[4, 2], 10_000, false).is_err());
    }

    #[test]
    fn identical_pair_sweep_error_within_quantization_slack() {
        let p = distribution_zoo(2).pop().unwrap();
        let k_quant = 100_000u64;
        let records = discretization_sweep(&p, &p, &[4, 8], k_quant, false).unwrap();
        for r in &records {
            let slack = quantization_slack_w2sq(2, r.l, k_quant);
            assert!(
                r.abs_error.unwrap() <= slack,
                "L={}: error {} above slack {slack}",
                r.l,
                r.abs_error.unwrap()
            );
        }
    }

    #[test]
    fn nonsmooth_bound_holds_on_a_pair() {
        let zoo = distribution_zoo(2);
        assert!(nonsmooth_bound_check(&zoo[1], &zoo[2], 4, 1_000_000).unwrap());
    }

    #[test]
    fn bench_counts_arcs_exactly() {
        let report = bench_scaling(2, &[2, 4, 8], 500, 11).unwrap();
        for row in &report.rows {
            assert_eq!(row.arcs, 2 * (row.l as usize).pow(3));
            assert_eq!(row.nodes, 3 * (row.l as usize).pow(2));
        }
        assert!(report.fitted_time_exponent.is_some());
    }

    #[test]
    fn csv_round_trip_and_determinism() {
        let p = uniform(1);
        let q = ProductDensity::new(vec![Factor1D::smooth_sine(0.4, 1).unwrap()]).unwrap();
        let cfg = CsrConfig {
            epsilon: 0.2,
            alpha: 1.0,
            d: 1,
            c_n: 1.0,
            c_l: 1.0,
            seed: 5,
            trials: 3,
        };
        let r1 = run_csr_experiment(&p, &q, &cfg, false).unwrap();
        let r2 = run_csr_experiment(&p, &q, &cfg, false).unwrap();
        let b1 = records_csv_bytes(&r1).unwrap();
        let b2 = records_csv_bytes(&r2).unwrap();
        assert_eq!(b1, b2);
        let header = String::from_utf8(b1.clone()).unwrap();
        assert!(header.starts_with(
            "epsilon,n,L,estimate,reference,abs_error,wall_time_build,wall_time_solve,wall_time_sample,seed,trial"
        ));
        let back = read_records_csv(&b1[..]).unwrap();
        assert_eq!(back, r1);
    }

    #[test]
    fn trial_streams_differ() {
        use rand::RngCore;
        let mut a = trial_rng(1, 0);
        let mut b = trial_rng(1, 1);
        let mut c = trial_rng(1, 0);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut a2 = trial_rng(1, 0);
        assert_eq!(a2.next_u64(), c.next_u64());
    }

    #[test]
    fn zoo_nonempty_and_valid() {
        assert_eq!(distribution_zoo(1).len(), 5);
        assert_eq!(distribution_zoo(2).len(), 4);
        for p in distribution_zoo(2) {
            assert_eq!(p.d(), 2);
        }
    }
}
