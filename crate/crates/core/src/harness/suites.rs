//! The experiment suites behind the CLI.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::funcs::FunctionTuple;
use crate::harness::config::{mixed_functions, ExperimentConfig, Family};
use crate::harness::stats::{fit_rate, mean, median, variance, variance_standard_error};
use crate::harness::tolerance::ToleranceSchedule;
use crate::oracle::{
    brute_force_j, gaussian_moment, hermite_ito_closed_form, midpoint_strat, transport_variance,
    SimplexQuadSpec,
};
use crate::ordinary::{ordinary_multiple, ordinary_via_decomposition, relative_sup_gap, sup_error};
use crate::paths::{gen_brownian, gen_transport, polygonal, DiscreteBrownianPath, RngSeed};
use crate::series::sup_distance;
use crate::strat::{strat_all_methods, stratonovich_levels, StratMethod};

/// Largest relative sup-gap tolerated between the two evaluators of `J_n`.
pub const LEMMA_TOLERANCE: f64 = 1e-6;

/// Number of standard errors a Monte Carlo estimate may sit from its target.
pub const MC_SIGMAS: f64 = 3.0;

/// Max-grid discrepancies `[GnSum-Recursion, GnSum-Expansion, Recursion-Expansion]`.
pub fn method_discrepancies(
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
) -> Result<[f64; 3]> {
    let [gn, rec, exp] = strat_all_methods(tuple, path)?;
    Ok([
        sup_distance(&gn, &rec),
        sup_distance(&gn, &exp),
        sup_distance(&rec, &exp),
    ])
}

pub const METHOD_PAIRS: [(StratMethod, StratMethod); 3] = [
    (StratMethod::GnSum, StratMethod::Recursion),
    (StratMethod::GnSum, StratMethod::Expansion),
    (StratMethod::Recursion, StratMethod::Expansion),
];

#[derive(Debug, Clone, Serialize)]
pub struct AgreementRow {
    pub path_index: usize,
    pub stream_index: u64,
    /// In [`METHOD_PAIRS`] order.
    pub discrepancies: [f64; 3],
    pub midpoint_vs_gn_sum: f64,
    /// Largest pairwise discrepancy on the same path observed at `N / 4`.
    pub coarse_max_discrepancy: Option<f64>,
}

impl AgreementRow {
    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies.iter().fold(0.0, |m, &d| m.max(d))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub n: usize,
    pub grid: usize,
    pub master_seed: u64,
    pub tolerance: f64,
    pub rows: Vec<AgreementRow>,
    pub median_max_discrepancy: f64,
    pub median_coarse_max_discrepancy: Option<f64>,
    /// `median(coarse) / median(fine)` of the per-path largest discrepancy.
    pub refinement_ratio: Option<f64>,
    /// Midpoint comparison counts toward `passed` only for `n ≤ 3`.
    pub midpoint_checked: bool,
    pub passed: bool,
}

/// All three Stratonovich representations plus the midpoint oracle on
/// `num_paths` Brownian paths.
pub fn run_agreement_suite(cfg: &ExperimentConfig, mode: Execution) -> Result<AgreementReport> {
    run_agreement_suite_with(cfg, &ToleranceSchedule::calibrated(), mode)
}

pub fn run_agreement_suite_with(
    cfg: &ExperimentConfig,
    schedule: &ToleranceSchedule,
    mode: Execution,
) -> Result<AgreementReport> {
    cfg.validate()?;
    let tuple = cfg.tuple()?;
    let with_coarse = cfg.grid.is_multiple_of(4) && cfg.grid >= 4;
    let rows: Vec<Result<AgreementRow>> = map_indexed(cfg.num_paths, mode, |p| {
        let seed = RngSeed::new(cfg.master_seed, p as u64);
        let path = gen_brownian(cfg.grid, cfg.horizon, seed)?;
        let discrepancies = method_discrepancies(&tuple, &path)?;
        let gn = crate::strat::strat_integral(&tuple, &path, StratMethod::GnSum)?;
        let mid = midpoint_strat(&tuple, &path)?;
        let coarse_max_discrepancy = if with_coarse {
            let d = method_discrepancies(&tuple, &path.coarsen(4)?)?;
            Some(d.iter().fold(0.0f64, |m, &x| m.max(x)))
        } else {
            None
        };
        Ok(AgreementRow {
            path_index: p,
            stream_index: seed.stream_index,
            discrepancies,
            midpoint_vs_gn_sum: sup_distance(&gn, &mid),
            coarse_max_discrepancy,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let tolerance = schedule.tol(cfg.grid, cfg.horizon);
    let midpoint_checked = cfg.n <= 3;
    let passed = rows.iter().all(|r| {
        r.max_discrepancy() <= tolerance && (!midpoint_checked || r.midpoint_vs_gn_sum <= tolerance)
    });
    let fine: Vec<f64> = rows.iter().map(AgreementRow::max_discrepancy).collect();
    let median_max_discrepancy = median(&fine);
    let median_coarse_max_discrepancy = with_coarse.then(|| {
        let coarse: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.coarse_max_discrepancy)
            .collect();
        median(&coarse)
    });
    let refinement_ratio = median_coarse_max_discrepancy.map(|c| c / median_max_discrepancy);
    Ok(AgreementReport {
        n: cfg.n,
        grid: cfg.grid,
        master_seed: cfg.master_seed,
        tolerance,
        rows,
        median_max_discrepancy,
        median_coarse_max_discrepancy,
        refinement_ratio,
        midpoint_checked,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub m: f64,
    pub path_index: usize,
    pub stream_index: u64,
    pub sup_error: f64,
    pub terminal_error: f64,
    pub runtime_ms: u64,
    /// Relative sup-gap between the recursive and decomposed `J_n`.
    pub lemma_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub m: f64,
    pub median_sup_error: f64,
    pub mean_sup_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub master_seed: u64,
    pub num_paths: usize,
    /// Sorted by `(m, path_index)`.
    pub rows: Vec<ConvergenceRow>,
    pub summary: Vec<SummaryRow>,
    pub fitted_rate: Option<f64>,
    pub max_lemma_gap: f64,
}

impl ConvergenceReport {
    pub fn lemma_holds(&self) -> bool {
        self.max_lemma_gap <= LEMMA_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.lemma_holds() && self.fitted_rate.is_some_and(|r| r < 0.0)
    }

    pub fn summary_for(&self, m: f64) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.m == m)
    }
}

/// Pathwise sup-distance between `J_n^(m)` on polygonal approximations and
/// `I_n^S` of the underlying Brownian path, for every `m` in the config.
pub fn run_polygonal_convergence(
    cfg: &ExperimentConfig,
    mode: Execution,
) -> Result<ConvergenceReport> {
    cfg.validate()?;
    if cfg.family != Family::Polygonal {
        return Err(Error::config(
            "family",
            "polygonal convergence needs family = polygonal",
        ));
    }
    let tuple = cfg.tuple()?;
    let n = tuple.order();
    let delta = cfg.delta();
    let per_path: Vec<Result<Vec<ConvergenceRow>>> = map_indexed(cfg.num_paths, mode, |p| {
        let seed = RngSeed::new(cfg.master_seed, p as u64);
        let brownian = gen_brownian(cfg.grid, cfg.horizon, seed)?;
        let strat = stratonovich_levels(&tuple, &brownian)?.pop().unwrap();
        cfg.m_values
            .iter()
            .map(|&m| {
                let clock = Instant::now();
                let approx = polygonal(&brownian, m as usize)?;
                let levels = ordinary_multiple(&tuple, &approx, delta)?;
                let top = &levels[n - 1];
                let decomposed =
                    ordinary_via_decomposition(&tuple, &approx, &levels[..n - 1], delta)?;
                let lemma_gap = relative_sup_gap(top, &decomposed);
                let sup = sup_error(top, &strat);
                let terminal = (top.terminal() - strat.terminal()).abs();
                let runtime_ms = if cfg.record_timings {
                    clock.elapsed().as_millis() as u64
                } else {
                    0
                };
                Ok(ConvergenceRow {
                    m,
                    path_index: p,
                    stream_index: seed.stream_index,
                    sup_error: sup,
                    terminal_error: terminal,
                    runtime_ms,
                    lemma_gap,
                })
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(cfg.num_paths * cfg.m_values.len());
    for r in per_path {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.m.total_cmp(&b.m).then(a.path_index.cmp(&b.path_index)));

    let mut ms = cfg.m_values.clone();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    let summary: Vec<SummaryRow> = ms
        .iter()
        .map(|&m| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.m == m)
                .map(|r| r.sup_error)
                .collect();
            SummaryRow {
                m,
                median_sup_error: median(&errs),
                mean_sup_error: mean(&errs),
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = summary.iter().map(|s| (s.m, s.median_sup_error)).collect();
    let fitted_rate = match fit_rate(&points) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("{e}");
            None
        }
    };
    let max_lemma_gap = rows.iter().fold(0.0f64, |g, r| g.max(r.lemma_gap));
    Ok(ConvergenceReport {
        master_seed: cfg.master_seed,
        num_paths: cfg.num_paths,
        rows,
        summary,
        fitted_rate,
        max_lemma_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceCheck {
    pub m: f64,
    pub t: f64,
    pub empirical: f64,
    pub analytic: f64,
    pub standard_error: f64,
    /// `(empirical - analytic) / standard_error`.
    pub z: f64,
}

impl VarianceCheck {
    pub fn passed(&self) -> bool {
        self.z.abs() <= MC_SIGMAS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCheck {
    pub m: f64,
    pub mean: f64,
    pub target_mean: f64,
    /// `|mean - target| / (sd / sqrt(paths))`.
    pub mean_distance: f64,
    pub variance: f64,
    pub target_variance: f64,
    pub variance_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportReport {
    pub master_seed: u64,
    pub num_paths: usize,
    pub variance_checks: Vec<VarianceCheck>,
    /// Sorted by `m`.
    pub moment_checks: Vec<MomentCheck>,
    pub passed: bool,
}

impl TransportReport {
    pub fn mean_distance_decreases(&self) -> bool {
        match (self.moment_checks.first(), self.moment_checks.last()) {
            (Some(lo), Some(hi)) if self.moment_checks.len() > 1 => {
                hi.mean_distance < lo.mean_distance
            }
            _ => false,
        }
    }
}

/// Distributional checks of the transport family: the path variance at
/// `T/2` and `T`, and the first two moments of `J_n^(m)(T)` for `f ≡ 1`
/// against those of `W(T)^n / n!`.
pub fn run_transport_suite(cfg: &ExperimentConfig, mode: Execution) -> Result<TransportReport> {
    cfg.validate()?;
    if cfg.family != Family::Transport {
        return Err(Error::config(
            "family",
            "transport suite needs family = transport",
        ));
    }
    let tuple = cfg.tuple()?;
    if !tuple.all_unit() {
        return Err(Error::config(
            "functions",
            "moment targets are only known for f ≡ 1",
        ));
    }
    let n = tuple.order();
    let horizon = cfg.horizon;
    let delta = cfg.delta();
    let mut ms = cfg.m_values.clone();
    ms.sort_by(f64::total_cmp);
    ms.dedup();

    // Per path: for each m, (W(T/2), W(T), J_n(T)).
    let samples: Vec<Result<Vec<[f64; 3]>>> = map_indexed(cfg.num_paths, mode, |p| {
        let seed = RngSeed::new(cfg.master_seed, p as u64);
        ms.iter()
            .map(|&m| {
                let path = gen_transport(m, horizon, seed)?;
                let j = if n == 1 {
                    path.terminal()
                } else {
                    ordinary_multiple(&tuple, &path, delta)?[n - 1].terminal()
                };
                Ok([path.eval(0.5 * horizon)?, path.terminal(), j])
            })
            .collect()
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let target_mean = gaussian_moment(n as u32, horizon) / factorial;
    let target_variance = (gaussian_moment(2 * n as u32, horizon)
        - (target_mean * factorial).powi(2))
        / factorial.powi(2);
    let paths = cfg.num_paths as f64;

    let mut variance_checks = Vec::new();
    let mut moment_checks = Vec::new();
    for (i, &m) in ms.iter().enumerate() {
        for (slot, t) in [(0, 0.5 * horizon), (1, horizon)] {
            let xs: Vec<f64> = samples.iter().map(|s| s[i][slot]).collect();
            let empirical = variance(&xs);
            let analytic = transport_variance(m, t);
            let standard_error = variance_standard_error(&xs);
            variance_checks.push(VarianceCheck {
                m,
                t,
                empirical,
                analytic,
                standard_error,
                z: (empirical - analytic) / standard_error,
            });
        }
        let js: Vec<f64> = samples.iter().map(|s| s[i][2]).collect();
        let (mu, var) = (mean(&js), variance(&js));
        moment_checks.push(MomentCheck {
            m,
            mean: mu,
            target_mean,
            mean_distance: (mu - target_mean).abs() / (var / paths).sqrt(),
            variance: var,
            target_variance,
            variance_distance: (var - target_variance).abs() / variance_standard_error(&js),
        });
    }
    let mut report = TransportReport {
        master_seed: cfg.master_seed,
        num_paths: cfg.num_paths,
        variance_checks,
        moment_checks,
        passed: false,
    };
    report.passed = report.variance_checks.iter().all(VarianceCheck::passed)
        && report.mean_distance_decreases();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    /// `observed ≤ threshold` unless `at_least` is set.
    pub at_least: bool,
    pub passed: bool,
}

impl OracleCheck {
    fn at_most(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            threshold,
            at_least: false,
            passed: observed <= threshold,
        }
    }

    fn at_least(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            threshold,
            at_least: true,
            passed: observed >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub master_seed: u64,
    /// Simplex quadrature mesh `M`.
    pub mesh: usize,
    /// Quadrature mesh of the recursive `J_n`, as `T / cells`.
    pub delta_cells: usize,
    pub variance_paths: usize,
    pub refinement_seeds: usize,
    pub grid: usize,
    pub mode: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            master_seed: 7,
            mesh: 1 << 12,
            delta_cells: 1 << 14,
            variance_paths: 100_000,
            refinement_seeds: 20,
            grid: 1 << 14,
            mode: Execution::Parallel,
        }
    }
}

/// Brute-force simplex quadrature on the deterministic path set: three
/// transport paths at `m = 8` and one polygonal path at `m = 16`.
pub fn oracle_paths(master_seed: u64) -> Result<Vec<(String, crate::PiecewiseLinearPath)>> {
    let mut out = Vec::new();
    for s in 0..3u64 {
        let p = gen_transport(8.0, 1.0, RngSeed::new(master_seed, s))?;
        out.push((format!("transport_m8_stream{s}"), p));
    }
    let w = gen_brownian(1 << 10, 1.0, RngSeed::new(master_seed, 3))?;
    out.push(("polygonal_m16_stream3".to_string(), polygonal(&w, 16)?));
    Ok(out)
}

pub fn run_oracle_suite(opts: &OracleOptions) -> Result<OracleReport> {
    let mut checks = Vec::new();

    // Simplex quadrature against the recursive J_n.
    let paths = oracle_paths(opts.master_seed)?;
    let delta = 1.0 / opts.delta_cells as f64;
    for n in [2usize, 3] {
        for (label, tuple) in [
            ("ones", FunctionTuple::ones(n, 1.0)?),
            ("mixed", FunctionTuple::new(mixed_functions(n), 1.0)?),
        ] {
            for (name, path) in &paths {
                let spec = SimplexQuadSpec::new(n, opts.mesh)?;
                let brute = brute_force_j(&tuple, path, spec)?;
                let recursive = ordinary_multiple(&tuple, path, delta)?[n - 1].terminal();
                checks.push(OracleCheck::at_most(
                    format!("brute_force_j n={n} {label} {name}"),
                    (brute - recursive).abs(),
                    1e-4,
                ));
            }
        }
    }

    // ∂p_n/∂w = p_{n-1}.
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for w in [-1.7, -0.4, 0.9, 2.3] {
            for t in [0.5, 1.0, 2.0] {
                let fd = (hermite_ito_closed_form(n, w + h, t)
                    - hermite_ito_closed_form(n, w - h, t))
                    / (2.0 * h);
                let exact = hermite_ito_closed_form(n - 1, w, t);
                worst = worst.max((fd - exact).abs() / exact.abs());
            }
        }
    }
    checks.push(OracleCheck::at_most("hermite_derivative", worst, 10.0 * h));

    // Transport variance formula against brute Monte Carlo at m = 1, t = 1.
    let xs: Vec<Result<f64>> = map_indexed(opts.variance_paths, opts.mode, |p| {
        gen_transport(1.0, 1.0, RngSeed::new(opts.master_seed ^ 0x7a, p as u64))
            .map(|w| w.terminal())
    });
    let xs = xs.into_iter().collect::<Result<Vec<_>>>()?;
    let z = (variance(&xs) - transport_variance(1.0, 1.0)) / variance_standard_error(&xs);
    checks.push(OracleCheck::at_most(
        "transport_variance_m1 |z|",
        z.abs(),
        MC_SIGMAS,
    ));

    // Midpoint sums and the recursion approach each other under refinement.
    for n in [2usize, 3] {
        let tuple = FunctionTuple::new(mixed_functions(n), 1.0)?;
        let gaps: Vec<Result<(f64, f64)>> = map_indexed(opts.refinement_seeds, opts.mode, |p| {
            let fine = gen_brownian(
                opts.grid,
                1.0,
                RngSeed::new(opts.master_seed, 100 + p as u64),
            )?;
            let coarse = fine.coarsen(4)?;
            let gap = |path: &DiscreteBrownianPath| -> Result<f64> {
                let rec = crate::strat::strat_integral(&tuple, path, StratMethod::Recursion)?;
                Ok(sup_distance(&rec, &midpoint_strat(&tuple, path)?))
            };
            Ok((gap(&fine)?, gap(&coarse)?))
        });
        let gaps = gaps.into_iter().collect::<Result<Vec<_>>>()?;
        let fine: Vec<f64> = gaps.iter().map(|g| g.0).collect();
        let coarse: Vec<f64> = gaps.iter().map(|g| g.1).collect();
        checks.push(OracleCheck::at_least(
            format!("midpoint_refinement_ratio n={n}"),
            median(&coarse) / median(&fine),
            1.5,
        ));
    }

    Ok(OracleReport { checks })
}
