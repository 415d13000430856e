//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use expobern::analysis::*;
use expobern::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reproduction() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let degrees: Vec<u32> = (1..=30).chain([100]).collect();
    for d in 1..=3usize {
        let grid = Grid::default_for(d);
        for mu in [0.5, 1.0, 2.0] {
            let corpus = builtin_corpus(d, mu).unwrap();
            for name in ["exp", "exp2"] {
                let f = &corpus.lookup(name).unwrap().field;
                let exact = expobern::tensor::field_on_grid(f, &grid);
                for &n in &degrees {
                    let params = OperatorParams::new(n, mu, d).unwrap();
                    // full lattice contraction, no separable shortcut
                    let op = TensorOperator::new(f, &params, OperatorKind::Exponential).unwrap();
                    let approx = op.eval_grid(&grid).unwrap();
                    let err = approx.iter().zip(&exact).map(|(a, e)| (a - e).abs()).fold(0.0, f64::max);
                    let scaled = err / (mu * d as f64).exp();
                    worst = worst.max(scaled);
                    if scaled > 1e-10 {
                        failures.push(format!("{name} d={d} mu={mu} n={n}: {scaled:.2e}"));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("max err/e^(mu d) = {worst:.2e} (tol 1e-10) {}", failures.join("; ")),
    )
}

fn closed_forms() -> Outcome {
    let mut r = rng(42);
    let mut worst = [0.0f64; 4];
    let labels = ["e0", "exp^3", "exp^4", "centered"];
    for _ in 0..64 {
        let d = r.gen_range(1..=3usize);
        let n = r.gen_range(1..=100u32);
        let mu = r.gen_range(0.1..2.0);
        let x = random_point(&mut r, d);
        let params = OperatorParams::new(n, mu, d).unwrap();
        let s: f64 = x.iter().sum();
        let brute = [
            multi_gn_naive(&|_: &[f64]| 1.0, n, mu, &x),
            multi_gn_naive(&|y: &[f64]| (3.0 * mu * y.iter().sum::<f64>()).exp(), n, mu, &x),
            multi_gn_naive(&|y: &[f64]| (4.0 * mu * y.iter().sum::<f64>()).exp(), n, mu, &x),
            multi_gn_naive(
                &|y: &[f64]| ((mu * y.iter().sum::<f64>()).exp() - (mu * s).exp()).powi(2),
                n,
                mu,
                &x,
            ),
        ];
        let closed = [
            multi_gn_e0_closed(&params, &x).unwrap(),
            multi_gn_e3_closed(&params, &x).unwrap(),
            multi_gn_e4_closed(&params, &x).unwrap(),
            multi_gn_centered_exp_sq(&params, &x).unwrap(),
        ];
        for i in 0..4 {
            worst[i] = worst[i].max(rel_err(closed[i], brute[i]));
        }
    }
    let detail = labels
        .iter()
        .zip(&worst)
        .map(|(l, w)| format!("{l} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(worst.iter().all(|&w| w < 1e-11), format!("max rel err: {detail} (tol 1e-11, 64 probes each)"))
}

fn moment_bound() -> Outcome {
    let mut worst_ratio = 0.0f64;
    for n in 1..=500u32 {
        let params = OperatorParams::univariate(n, 0.0).unwrap();
        let bound = 0.5 / (n as f64).sqrt();
        for i in 0..257 {
            let m = first_moment(&params, i as f64 / 256.0).unwrap();
            worst_ratio = worst_ratio.max(m / bound);
        }
    }
    outcome(worst_ratio <= 1.0, format!("max moment / (1/(2 sqrt n)) = {worst_ratio:.6}"))
}

fn gamma_asymptotics() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for mu in [0.5, 1.0, 2.0] {
        let p = OperatorParams::univariate(10_000, mu).unwrap();
        let gap = (10_000.0 * gamma_n_closed(&p) - mu / 8.0).abs();
        pass &= gap < 0.01 * mu;
        let mut oracle_gap = 0.0f64;
        for n in [1u32, 2, 5, 10, 100, 1000, 10_000] {
            let q = OperatorParams::univariate(n, mu).unwrap();
            oracle_gap = oracle_gap.max((gamma_n_closed(&q) - gamma_n_grid(&q, 4097).unwrap()).abs());
        }
        pass &= oracle_gap < 1e-8;
        parts.push(format!("mu={mu}: |n g - mu/8|={gap:.2e}, closed-grid={oracle_gap:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn e0_convergence() -> Outcome {
    let corpus = builtin_corpus(2, 1.0).unwrap();
    let e0 = &corpus.lookup("e0").unwrap().field;
    let grid = Grid::default_for(2);
    let mut errors = Vec::new();
    let mut pass = true;
    for n in [50u32, 100, 200, 400] {
        let p = OperatorParams::new(n, 1.0, 2).unwrap();
        let err = sup_error(e0, &p, &grid, OperatorKind::Exponential).unwrap();
        pass &= err <= e0_bound(&p);
        errors.push(err);
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    pass &= ratios.iter().all(|&r| r <= 0.55);
    outcome(
        pass,
        format!(
            "errors {:?}, doubling ratios {:?} (tol 0.55)",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn bound_dominance() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut tightest = (f64::INFINITY, String::new());
    for d in 1..=2usize {
        let grid = Grid::default_for(d);
        for mu in [0.5, 1.0] {
            let corpus = builtin_corpus(d, mu).unwrap();
            for entry in corpus.entries() {
                let src = ModulusSource::estimated(grid.clone());
                let report =
                    convergence_sweep(&entry.field, mu, &[50, 100, 200, 400], &grid, OperatorKind::Exponential, &src)
                        .unwrap();
                for rec in report.records() {
                    checked += 1;
                    let margin = rec.bound_rhs / rec.sup_error.max(f64::MIN_POSITIVE);
                    if margin < tightest.0 {
                        tightest = (margin, format!("{} d={d} mu={mu} n={}", entry.name(), rec.n));
                    }
                    if !rec.bound_holds() {
                        failures.push(format!("{} d={d} mu={mu} n={}", entry.name(), rec.n));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} (f, d, mu, n) cases, tightest bound/error = {:.2} at {} {}",
            tightest.0,
            tightest.1,
            failures.join("; ")
        ),
    )
}

fn lipschitz_rate() -> Outcome {
    let ns = [25u32, 50, 100, 200, 400];
    let mut fitted = 0;
    let mut floor = 0;
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for d in 1..=2usize {
        let grid = Grid::default_for(d);
        for mu in [0.5, 1.0] {
            let corpus = builtin_corpus(d, mu).unwrap();
            for entry in corpus.entries() {
                let Some(alpha) = entry.lip_alpha() else { continue };
                let src = ModulusSource::estimated(grid.clone());
                let report = convergence_sweep(&entry.field, mu, &ns, &grid, OperatorKind::Exponential, &src).unwrap();
                match fit_rate(&report, 25).unwrap() {
                    RateFit::FloorLimited => floor += 1,
                    RateFit::Rate(s) => {
                        fitted += 1;
                        worst_margin = worst_margin.min(-alpha / 2.0 + RATE_SLACK - s);
                        if !rate_guarantee_holds(s, alpha) {
                            failures.push(format!("{} d={d} mu={mu}: slope {s:.3}, alpha {alpha}", entry.name()));
                        }
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{fitted} fits, {floor} floor-limited, min margin to -alpha/2+0.1 = {worst_margin:.3} {}",
            failures.join("; ")
        ),
    )
}

fn property_suites() -> Outcome {
    let mut r = rng(42);
    let mut failures = Vec::new();

    let mut pu = 0.0f64;
    for _ in 0..10_000 {
        let n = r.gen_range(1..=2000u32);
        let t = r.gen::<f64>();
        let v = basis_vector(n, t).unwrap();
        if v.iter().any(|&p| p < 0.0) {
            failures.push("negative basis value".to_string());
        }
        pu = pu.max((v.iter().sum::<f64>() - 1.0).abs());
    }
    if pu >= 1e-12 {
        failures.push(format!("partition of unity {pu:.1e}"));
    }

    let base = |y: &[f64]| (5.0 * y[0] * y[1]).sin().abs();
    let f = ScalarField::new("f", 2, base);
    for _ in 0..200 {
        let n = r.gen_range(1..=20u32);
        let mu = r.gen_range(0.0..3.0);
        let shift = r.gen::<f64>();
        let g = ScalarField::new("g", 2, move |y: &[f64]| base(y) + shift * y[1]);
        let p = OperatorParams::new(n, mu, 2).unwrap();
        let x = random_point(&mut r, 2);
        let (gf, gg) = (multi_gn_apply(&f, &p, &x).unwrap(), multi_gn_apply(&g, &p, &x).unwrap());
        if gf < 0.0 || gf > gg + 1e-12 {
            failures.push(format!("positivity/monotonicity n={n} mu={mu}"));
        }
        for corner in [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] {
            let v = multi_gn_apply(&g, &p, &corner).unwrap();
            let exact = g.eval(&corner);
            if (v - exact).abs() > 1e-12 * (1.0 + exact.abs()) {
                failures.push(format!("endpoint interpolation n={n} corner={corner:?}"));
            }
        }
    }

    for _ in 0..10_000 {
        let d = r.gen_range(1..=3usize);
        let mu = r.gen_range(0.01..3.0);
        let a = random_point(&mut r, d);
        let b = random_point(&mut r, d);
        if korovkin_witness(&a, &b, mu).unwrap() <= 0.0 || korovkin_witness(&a, &a, mu).unwrap() != 0.0 {
            failures.push("witness sign".to_string());
        }
    }

    let h = |y: &[f64]| (3.0 * y[0] - y[1]).cos() * (1.0 + y[1]);
    let field = ScalarField::new("h", 2, h);
    let mut oracle = 0.0f64;
    for n in 1..=8u32 {
        for _ in 0..16 {
            let mu = r.gen_range(0.0..3.0);
            let x = random_point(&mut r, 2);
            let p = OperatorParams::new(n, mu, 2).unwrap();
            let expected = multi_gn_naive(&h, n, mu, &x);
            let got = multi_gn_apply(&field, &p, &x).unwrap();
            oracle = oracle.max((got - expected).abs() / (1.0 + expected.abs()));
        }
    }
    if oracle > 1e-13 {
        failures.push(format!("recursive oracle {oracle:.1e}"));
    }
    failures.dedup();
    outcome(
        failures.is_empty(),
        format!(
            "partition {pu:.1e}, recursive oracle {oracle:.1e}, 10^4 witness pairs {}",
            failures.join("; ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reproduction of exp and exp^2 on grids", reproduction, 120),
        ("closed forms vs brute-force sums", closed_forms, 60),
        ("first absolute moment bound", moment_bound, 30),
        ("gamma_n asymptotics and oracle", gamma_asymptotics, 10),
        ("e0 convergence bound and halving", e0_convergence, 120),
        ("quantitative bound dominance", bound_dominance, 300),
        ("Lipschitz rate", lipschitz_rate, 300),
        ("property suites", property_suites, 300),
    ];
    let mut all = true;
    println!();
    for (i, (label, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = out.pass && in_time;
        all &= pass;
        println!(
            "criterion {}: {} {label}: {} [{:.2} s, limit {limit} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail.trim_end(),
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
