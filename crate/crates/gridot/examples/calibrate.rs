// Scratch calibration runs for the acceptance experiments.

use std::time::Instant;

use gridot::harness::*;
use gridot::measures::*;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "sweep".into());
    match which.as_str() {
        "sweep" => sweep(),
        "csr" => csr(),
        "bench" => bench(),
        "exact1d" => exact1d(),
        _ => eprintln!("unknown mode"),
    }
}

// Exact 1D grid-vs-grid W₂² through step-quantile integration: no sampling,
// no quantization, no flow solver. For product pairs the 2D sweep error is
// the sum of two of these curves, so this isolates the true h-asymptotics.
fn exact1d() {
    let f = Factor1D::holder_cusp(0.5, 0.3, 0.5).unwrap();
    let g = Factor1D::uniform();
    let reference = ref_w2sq_1d(&f, &g, 64).unwrap();
    println!("1d reference = {reference:.12e}");
    let grid_w2sq_1d = |l: u32| -> f64 {
        // Breakpoints of both step quantile functions.
        let mut cuts: Vec<f64> = Vec::new();
        for j in 0..=l {
            cuts.push(f.cdf(j as f64 / l as f64).unwrap());
            cuts.push(g.cdf(j as f64 / l as f64).unwrap());
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let center = |a: usize| (2 * a + 1) as f64 / (2.0 * l as f64);
        // Walk panels; cell of u under F is the j with F(j/L) ≤ u < F((j+1)/L).
        let mut total = 0.0;
        let (mut fa, mut ga) = (0usize, 0usize);
        for w in cuts.windows(2) {
            let (u1, u2) = (w[0], w[1]);
            if u2 <= u1 {
                continue;
            }
            while fa + 1 < l as usize && f.cdf((fa + 1) as f64 / l as f64).unwrap() <= u1 + 1e-15 {
                fa += 1;
            }
            while ga + 1 < l as usize && g.cdf((ga + 1) as f64 / l as f64).unwrap() <= u1 + 1e-15 {
                ga += 1;
            }
            let d = center(fa) - center(ga);
            total += d * d * (u2 - u1);
        }
        total
    };
    let mut prev: Option<f64> = None;
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for e in 2..=12u32 {
        let l = 1u32 << e;
        let est = grid_w2sq_1d(l);
        let err = (est - reference).abs();
        let local = prev.map(|p: f64| (p / err).log2()).unwrap_or(f64::NAN);
        println!("L={l:5} est={est:.9e} err={err:.6e} local_slope={local:.3}");
        prev = Some(err);
        if l <= 64 {
            hs.push(1.0 / l as f64);
            errs.push(err.max(1e-18));
        }
    }
    println!(
        "slope over L in 4..=64: {:.4}",
        fit_loglog_slope(&hs, &errs).unwrap()
    );
}

fn sweep() {
    let p = ProductDensity::new(vec![
        Factor1D::holder_cusp(0.5, 0.3, 0.5).unwrap(),
        Factor1D::uniform(),
    ])
    .unwrap();
    let q = ProductDensity::new(vec![
        Factor1D::uniform(),
        Factor1D::holder_cusp(0.5, -0.3, 0.5).unwrap(),
    ])
    .unwrap();
    let t0 = Instant::now();
    let reference = ref_w2sq_product(&p, &q).unwrap();
    println!("reference = {reference:.12e}  ({}s)", t0.elapsed().as_secs_f64());
    for k_quant in [100_000_000u64, 1_000_000_000] {
        let t0 = Instant::now();
        let records = discretization_sweep(&p, &q, &[4, 8, 16, 32, 64], k_quant, true).unwrap();
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for r in &records {
            println!(
                "k={k_quant} L={} est={:.10e} err={:.6e} build={:.2}s solve={:.2}s",
                r.l,
                r.estimate,
                r.abs_error.unwrap(),
                r.wall_time_build.unwrap(),
                r.wall_time_solve.unwrap()
            );
            hs.push(r.epsilon);
            errs.push(r.abs_error.unwrap().max(1e-18));
        }
        let slope = fit_loglog_slope(&hs, &errs).unwrap();
        println!("k={k_quant} slope = {slope:.4}  total {:.1}s", t0.elapsed().as_secs_f64());
    }
}

fn csr() {
    let p = ProductDensity::new(vec![
        Factor1D::smooth_sine(0.5, 1).unwrap(),
        Factor1D::smooth_sine(-0.3, 2).unwrap(),
    ])
    .unwrap();
    let q = ProductDensity::new(vec![
        Factor1D::smooth_sine(-0.4, 1).unwrap(),
        Factor1D::smooth_sine(0.6, 1).unwrap(),
    ])
    .unwrap();
    println!("ref = {:.10e}", ref_w2sq_product(&p, &q).unwrap());
    for (c_n, c_l) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (2.0, 2.0), (4.0, 2.0)] {
        let cfg = CsrConfig {
            epsilon: 0.05,
            alpha: 0.9,
            d: 2,
            c_n,
            c_l,
            seed: 20240817,
            trials: 20,
        };
        let t0 = Instant::now();
        let records = run_csr_experiment(&p, &q, &cfg, true).unwrap();
        let s = summarize(&records);
        println!(
            "c_n={c_n} c_l={c_l} n={} L={} mean_abs_err={:.5} se={:.5} mean_est={:.5} ({:.1}s)",
            cfg.derived_n(),
            cfg.derived_l(),
            s.mean_abs_error.unwrap(),
            s.std_error_abs_error.unwrap(),
            s.mean_estimate,
            t0.elapsed().as_secs_f64()
        );
    }
}

fn bench() {
    let report = bench_scaling(2, &[8, 16, 32, 64], 100_000, 7).unwrap();
    for r in &report.rows {
        println!(
            "L={} nodes={} arcs={} build={:.3}s solve={:.3}s",
            r.l, r.nodes, r.arcs, r.build_secs, r.solve_secs
        );
    }
    println!("fitted exponent = {:?}", report.fitted_time_exponent);
}
