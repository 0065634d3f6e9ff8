use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use multistrat::exec::Execution;
use multistrat::harness::config::{mixed_functions, ExperimentConfig, Family};
use multistrat::harness::report;
use multistrat::harness::suites::{
    run_agreement_suite, run_oracle_suite, run_polygonal_convergence, run_transport_suite,
    OracleOptions, METHOD_PAIRS,
};
use multistrat::harness::tolerance::calibrate;
use multistrat::multi_index::enumerate_gn;
use multistrat::{Error, FunctionSpec};

#[derive(Parser)]
#[command(
    name = "multistrat",
    version,
    about = "Multiple Stratonovich integrals as limits of ordinary ones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct Overrides {
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Override the Brownian grid size N.
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads (1 = sequential). Output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the agreement and oracle suites.
    Check {
        #[command(flatten)]
        opts: Overrides,
    },
    /// Polygonal convergence study.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        opts: Overrides,
        /// Record wall-clock runtime_ms (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Transport process statistics.
    Transport {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Print the multi-indices of {1,2} summing to n, with their weights.
    TabulateGn {
        #[arg(long)]
        n: usize,
    },
    /// Re-derive the agreement tolerance and print it as JSON.
    Calibrate {
        #[command(flatten)]
        opts: Overrides,
        #[arg(long, default_value_t = 2.0)]
        safety: f64,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::Json(_) | Error::Argument(_) | Error::Io(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn apply(cfg: &mut ExperimentConfig, opts: &Overrides) -> multistrat::Result<()> {
    if let Some(s) = opts.seed {
        cfg.master_seed = s;
    }
    if let Some(p) = opts.paths {
        cfg.num_paths = p;
    }
    if let Some(g) = opts.grid {
        cfg.grid = g;
    }
    if let Some(o) = &opts.out {
        cfg.output = Some(o.clone());
    }
    cfg.validate()
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(command: Command) -> multistrat::Result<Outcome> {
    match command {
        Command::Check { opts } => check(&opts),
        Command::Converge {
            config,
            opts,
            timings,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            apply(&mut cfg, &opts)?;
            cfg.record_timings |= timings;
            let report = run_polygonal_convergence(&cfg, Execution::from_threads(opts.threads))?;
            let out = cfg
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from("convergence.csv"));
            let summary = report::write_convergence(&report, &out)?;
            for s in &report.summary {
                println!("m={:<8} median_sup_error={:.6e}", s.m, s.median_sup_error);
            }
            println!(
                "fitted_rate={}  max_lemma_gap={:.3e}",
                report
                    .fitted_rate
                    .map_or("nan".into(), |r| format!("{r:.4}")),
                report.max_lemma_gap
            );
            println!("wrote {} and {}", out.display(), summary.display());
            Ok(if report.passed() {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Transport { config, opts } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            apply(&mut cfg, &opts)?;
            let report = run_transport_suite(&cfg, Execution::from_threads(opts.threads))?;
            let out = cfg
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from("transport.csv"));
            let moments = report::write_transport(&report, &out)?;
            for v in &report.variance_checks {
                println!(
                    "{} var m={} t={}: z={:+.3}",
                    status(v.passed()),
                    v.m,
                    v.t,
                    v.z
                );
            }
            for c in &report.moment_checks {
                println!("m={} mean distance={:.3}", c.m, c.mean_distance);
            }
            println!("wrote {} and {}", out.display(), moments.display());
            Ok(if report.passed {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::TabulateGn { n } => {
            for alpha in enumerate_gn(n)? {
                println!("{alpha}\t{}", alpha.weight());
            }
            Ok(Outcome::Pass)
        }
        Command::Calibrate { opts, safety } => {
            let paths = opts.paths.unwrap_or(200);
            let seed = opts.seed.unwrap_or(20_240_601);
            let schedule = calibrate(
                paths,
                seed,
                &[1 << 10, 1 << 12, 1 << 14],
                safety,
                Execution::from_threads(opts.threads),
            )?;
            let text = serde_json::to_string_pretty(&schedule)? + "\n";
            match &opts.out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(Outcome::Pass)
        }
    }
}

fn check(opts: &Overrides) -> multistrat::Result<Outcome> {
    let mode = Execution::from_threads(opts.threads);
    let mut ok = true;
    for n in 1..=4 {
        for (label, functions) in [
            ("ones", vec![FunctionSpec::one(); n]),
            ("mixed", mixed_functions(n)),
        ] {
            let mut cfg = ExperimentConfig {
                horizon: 1.0,
                n,
                functions,
                grid: 1 << 14,
                delta: None,
                m_values: vec![1.0],
                num_paths: 20,
                master_seed: 42,
                family: Family::Polygonal,
                output: None,
                record_timings: false,
            };
            apply(&mut cfg, opts)?;
            let r = run_agreement_suite(&cfg, mode)?;
            let worst = |k: usize| {
                r.rows
                    .iter()
                    .fold(0.0f64, |m, row| m.max(row.discrepancies[k]))
            };
            let pairs: Vec<String> = METHOD_PAIRS
                .iter()
                .enumerate()
                .map(|(k, (a, b))| format!("{a}/{b}={:.2e}", worst(k)))
                .collect();
            let midpoint = r
                .rows
                .iter()
                .fold(0.0f64, |m, row| m.max(row.midpoint_vs_gn_sum));
            println!(
                "{} agreement n={n} {label}: tol={:.2e} {} midpoint={midpoint:.2e} ratio={}",
                status(r.passed),
                r.tolerance,
                pairs.join(" "),
                r.refinement_ratio.map_or("-".into(), |x| format!("{x:.2}"))
            );
            ok &= r.passed;
        }
    }
    let oracle = run_oracle_suite(&OracleOptions {
        master_seed: opts.seed.unwrap_or(7),
        mode,
        ..OracleOptions::default()
    })?;
    for c in &oracle.checks {
        let rel = if c.at_least { ">=" } else { "<=" };
        println!(
            "{} {}: {:.3e} {rel} {:.1e}",
            status(c.passed),
            c.name,
            c.observed,
            c.threshold
        );
    }
    ok &= oracle.passed();
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}
