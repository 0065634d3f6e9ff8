//! Acceptance criteria 1-8. Runs as a plain binary so that every criterion
//! prints exactly one PASS/FAIL line, in order, whatever the outcome of the
//! others; exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use multistrat::exec::Execution;
use multistrat::harness::config::{mixed_functions, ExperimentConfig, Family};
use multistrat::harness::stats::median;
use multistrat::harness::suites::{
    oracle_paths, run_agreement_suite, run_polygonal_convergence, run_transport_suite,
    LEMMA_TOLERANCE,
};
use multistrat::multi_index::{enumerate_gn, MultiIndex};
use multistrat::oracle::{brute_force_j, SimplexQuadSpec};
use multistrat::ordinary::{ordinary_multiple, ordinary_via_decomposition, relative_sup_gap};
use multistrat::paths::{gen_brownian, gen_transport, polygonal};
use multistrat::strat::strat_all_methods;
use multistrat::{FunctionTuple, PiecewiseLinearPath, RngSeed, StratMethod};

const MASTER_SEED: u64 = 42;
const DELTA: f64 = 1.0 / (1 << 14) as f64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn tuples(n: usize) -> [(&'static str, FunctionTuple); 2] {
    [
        ("ones", FunctionTuple::ones(n, 1.0).unwrap()),
        (
            "mixed",
            FunctionTuple::new(mixed_functions(n), 1.0).unwrap(),
        ),
    ]
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn criterion_1() -> Outcome {
    let expected = [1, 2, 3, 5, 8, 13];
    let counts: Vec<usize> = (1..=6).map(|n| enumerate_gn(n).unwrap().len()).collect();
    let mut passed = counts == expected;
    // G_{n+1} = {α ⊕ (1) : α ∈ G_n} ⊔ {α with its trailing 1 turned into 2 : α ∈ G_n, α_q = 1}.
    for n in 1..=6 {
        let gn = enumerate_gn(n).unwrap();
        let mut built: Vec<Vec<u8>> = Vec::new();
        for a in &gn {
            let mut appended = a.entries().to_vec();
            appended.push(1);
            built.push(appended);
        }
        for a in gn.iter().filter(|a| a.entries().last() == Some(&1)) {
            let mut bumped = a.entries().to_vec();
            *bumped.last_mut().unwrap() = 2;
            built.push(bumped);
        }
        let total = built.len();
        built.sort();
        built.dedup();
        let mut next: Vec<Vec<u8>> = enumerate_gn(n + 1)
            .unwrap()
            .iter()
            .map(|a| a.entries().to_vec())
            .collect();
        next.sort();
        passed &= total == built.len() && built == next;
        passed &= gn
            .iter()
            .all(|a| MultiIndex::new(a.entries().to_vec()).is_ok());
    }
    Outcome {
        passed,
        detail: format!("|G_n| for n=1..6 = {counts:?}; recursive identity checked for n=1..6"),
    }
}

fn criterion_2() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        for (label, tuple) in tuples(n) {
            let cfg = ExperimentConfig {
                horizon: 1.0,
                n,
                functions: tuple.funcs().to_vec(),
                grid: 1 << 14,
                delta: None,
                m_values: vec![1.0],
                num_paths: 20,
                master_seed: MASTER_SEED,
                family: Family::Polygonal,
                output: None,
                record_timings: false,
            };
            let r = run_agreement_suite(&cfg, Execution::Parallel).unwrap();
            let worst = r
                .rows
                .iter()
                .fold(0.0f64, |m, row| m.max(row.max_discrepancy()));
            // Methods that coincide to rounding leave no discretization error to refine.
            let vacuous = r.median_coarse_max_discrepancy.unwrap() <= 1e-12;
            let ratio = r.refinement_ratio.unwrap();
            let ok = r.passed && (vacuous || ratio >= 1.5);
            passed &= ok;
            parts.push(format!(
                "n={n} {label}: max={worst:.2e} ratio={}{}",
                if vacuous {
                    "n/a".to_string()
                } else {
                    format!("{ratio:.2}")
                },
                if ok { "" } else { " (!)" }
            ));
        }
    }
    let tol = run_tol();
    Outcome {
        passed,
        detail: format!("tol(2^14)={tol:.3e}; {}", parts.join("; ")),
    }
}

fn run_tol() -> f64 {
    multistrat::harness::ToleranceSchedule::calibrated().tol(1 << 14, 1.0)
}

fn criterion_3() -> Vec<(String, Outcome)> {
    // (a) I_n^S(T) against W(T)^n / n!, every method.
    let mut passed_a = true;
    let mut parts_a = Vec::new();
    for n in 1..=4 {
        let tuple = FunctionTuple::ones(n, 1.0).unwrap();
        let mut rel = [Vec::new(), Vec::new(), Vec::new()];
        for s in 0..20 {
            let path = gen_brownian(1 << 14, 1.0, RngSeed::new(MASTER_SEED, s)).unwrap();
            let exact = path.terminal().powi(n as i32) / factorial(n);
            for (k, series) in strat_all_methods(&tuple, &path).unwrap().iter().enumerate() {
                rel[k].push((series.terminal() - exact).abs() / exact.abs());
            }
        }
        let medians: Vec<f64> = rel.iter().map(|r| median(r)).collect();
        let ok = medians.iter().all(|&m| m <= 1e-2);
        passed_a &= ok;
        let named: Vec<String> = StratMethod::ALL
            .iter()
            .zip(&medians)
            .map(|(m, v)| format!("{m}={v:.2e}"))
            .collect();
        parts_a.push(format!(
            "n={n} {}{}",
            named.join(" "),
            if ok { "" } else { " (!)" }
        ));
    }

    // (b) J_n^(m)(T) against W^(m)(T)^n / n! on transport paths, within C δ²
    // with C = (T/12) n σ^n (1 + sup|W|)^n, σ the largest slope.
    let mut passed_b = true;
    let mut worst_ratio = 0.0f64;
    for s in 0..5 {
        let path = gen_transport(100.0, 1.0, RngSeed::new(MASTER_SEED, s)).unwrap();
        let levels =
            ordinary_multiple(&FunctionTuple::ones(4, 1.0).unwrap(), &path, DELTA).unwrap();
        for n in 1..=4 {
            let exact = path.terminal().powi(n as i32) / factorial(n);
            let sigma = path.max_abs_slope();
            let c = n as f64 / 12.0 * sigma.powi(n as i32) * (1.0 + path.sup_abs()).powi(n as i32);
            let bound = c * DELTA * DELTA;
            let err = (levels[n - 1].terminal() - exact).abs();
            passed_b &= err <= bound;
            worst_ratio = worst_ratio.max(err / bound);
        }
    }
    vec![
        (
            "3a".into(),
            Outcome {
                passed: passed_a,
                detail: format!(
                    "median relative error of I_n^S(T), N=2^14, 20 seeds: {}",
                    parts_a.join("; ")
                ),
            },
        ),
        (
            "3b".into(),
            Outcome {
                passed: passed_b,
                detail: format!(
                    "transport m=100, 5 paths, n<=4: max error/(C δ²) = {worst_ratio:.2e}"
                ),
            },
        ),
    ]
}

fn criterion_4() -> Outcome {
    let mut paths: Vec<(String, PiecewiseLinearPath)> = Vec::new();
    for s in 0..3 {
        let w = gen_brownian(1 << 14, 1.0, RngSeed::new(MASTER_SEED, s)).unwrap();
        for m in [16, 256, 1024] {
            paths.push((format!("polygonal m={m}"), polygonal(&w, m).unwrap()));
        }
        for m in [8.0, 100.0, 500.0] {
            let p = gen_transport(m, 1.0, RngSeed::new(MASTER_SEED, s)).unwrap();
            paths.push((format!("transport m={m}"), p));
        }
    }
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (name, path) in &paths {
        for n in 1..=4 {
            for (label, tuple) in tuples(n) {
                let levels = ordinary_multiple(&tuple, path, DELTA).unwrap();
                let d = ordinary_via_decomposition(&tuple, path, &levels[..n - 1], DELTA).unwrap();
                let gap = relative_sup_gap(&levels[n - 1], &d);
                if gap > worst {
                    worst = gap;
                    worst_at = format!("{name} n={n} {label}");
                }
            }
        }
    }
    Outcome {
        passed: worst <= LEMMA_TOLERANCE,
        detail: format!(
            "{} paths x n<=4 x 2 tuples: worst relative gap {worst:.2e} ({worst_at})",
            paths.len()
        ),
    }
}

fn criterion_5() -> Outcome {
    let paths = oracle_paths(7).unwrap();
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [2, 3] {
        for (_, tuple) in tuples(n) {
            for (_, path) in &paths {
                let brute =
                    brute_force_j(&tuple, path, SimplexQuadSpec::new(n, 1 << 12).unwrap()).unwrap();
                let rec = ordinary_multiple(&tuple, path, DELTA).unwrap()[n - 1].terminal();
                worst = worst.max((brute - rec).abs());
                count += 1;
            }
        }
    }
    Outcome {
        passed: worst <= 1e-4,
        detail: format!("{count} comparisons on 4 fixed paths: max |Δ| = {worst:.2e}"),
    }
}

fn criterion_6() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for file in ["polygonal_n2_mixed.json", "polygonal_n3_mixed.json"] {
        let cfg = ExperimentConfig::load(&configs_dir().join(file)).unwrap();
        let r = run_polygonal_convergence(&cfg, Execution::Parallel).unwrap();
        let lo = r.summary_for(16.0).unwrap().median_sup_error;
        let hi = r.summary_for(1024.0).unwrap().median_sup_error;
        let rate = r.fitted_rate.unwrap_or(f64::NAN);
        let ok = hi <= 0.25 * lo && rate < 0.0 && r.lemma_holds();
        passed &= ok;
        parts.push(format!(
            "n={}: median sup err m=16 {lo:.3e}, m=1024 {hi:.3e} (ratio {:.2}), rate {rate:.3}, lemma gap {:.1e}",
            cfg.n,
            lo / hi,
            r.max_lemma_gap
        ));
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let cfg = ExperimentConfig::load(&configs_dir().join("transport_n2_ones.json")).unwrap();
    let r = run_transport_suite(&cfg, Execution::Parallel).unwrap();
    let required = r
        .variance_checks
        .iter()
        .filter(|v| v.m == 10.0 || v.m == 100.0)
        .collect::<Vec<_>>();
    let var_ok = required.len() == 4 && r.variance_checks.iter().all(|v| v.passed());
    let zs: Vec<String> = r
        .variance_checks
        .iter()
        .map(|v| format!("(m={},t={}) z={:+.2}", v.m, v.t, v.z))
        .collect();
    let ds: Vec<String> = r
        .moment_checks
        .iter()
        .map(|c| format!("m={}: {:.2}", c.m, c.mean_distance))
        .collect();
    let first_last =
        r.moment_checks.first().unwrap().m == 10.0 && r.moment_checks.last().unwrap().m == 500.0;
    Outcome {
        passed: var_ok && first_last && r.mean_distance_decreases() && r.passed,
        detail: format!(
            "{} paths; variance {}; mean distance of J_2(T) from T/2: {}",
            r.num_paths,
            zs.join(" "),
            ds.join(", ")
        ),
    }
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("det.json");
    let cfg = serde_json::json!({
        "T": 1.0,
        "n": 2,
        "functions": [
            {"type": "poly", "coeffs": [1.0, 0.5]},
            {"type": "sin", "a": 2.0, "b": 0.3}
        ],
        "N": 4096,
        "m_values": [16, 64, 256, 1024],
        "num_paths": 16,
        "master_seed": 9,
        "family": "polygonal"
    });
    std::fs::write(&config, cfg.to_string()).unwrap();
    let run = |threads: &str, out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_multistrat"))
            .args(["converge", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads])
            .output()
            .unwrap()
            .status;
        assert!(
            status.code().is_some_and(|c| c <= 1),
            "converge exited with {status}"
        );
        let rows = std::fs::read(out).unwrap();
        let summary = std::fs::read(out.with_file_name(format!(
            "{}.summary.csv",
            out.file_stem().unwrap().to_str().unwrap()
        )))
        .unwrap();
        (rows, summary)
    };
    let a = run("1", &dir.path().join("a.csv"));
    let b = run("1", &dir.path().join("b.csv"));
    let c = run("4", &dir.path().join("c.csv"));
    let passed = a == b && a == c && !a.0.is_empty();
    Outcome {
        passed,
        detail: format!(
            "3 runs (1, 1, 4 threads): rows {} bytes, summary {} bytes, identical={passed}",
            a.0.len(),
            a.1.len()
        ),
    }
}

fn main() {
    let mut failures = 0;
    let mut report = |id: &str, budget_s: f64, run: &dyn Fn() -> Vec<(String, Outcome)>| {
        let clock = Instant::now();
        let outcomes = run();
        let secs = clock.elapsed().as_secs_f64();
        for (label, o) in outcomes {
            let label = if label.is_empty() {
                id.to_string()
            } else {
                label
            };
            let status = if o.passed { "PASS" } else { "FAIL" };
            if !o.passed {
                failures += 1;
            }
            println!(
                "criterion {label}: {status} [{secs:.1}s / budget {budget_s:.0}s] {}",
                o.detail
            );
        }
    };
    let single = |f: fn() -> Outcome| move || vec![(String::new(), f())];
    report("1", 1.0, &single(criterion_1));
    report("2", 120.0, &single(criterion_2));
    report("3", 60.0, &criterion_3);
    report("4", 60.0, &single(criterion_4));
    report("5", 120.0, &single(criterion_5));
    report("6", 600.0, &single(criterion_6));
    report("7", 300.0, &single(criterion_7));
    report("8", 60.0, &single(criterion_8));
    if failures > 0 {
        println!("{failures} acceptance criterion line(s) failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
