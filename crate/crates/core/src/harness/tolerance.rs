//! Calibrated tolerance for disagreement between the Stratonovich
//! representations: `tol(N) = C (T / N)^p`.
//!
//! `C` comes from a refinement study over orders 1..=4 and both tuple
//! families, run once with `multistrat calibrate` on seeds disjoint from the
//! test seeds and checked into `tolerances.json`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::funcs::FunctionTuple;
use crate::harness::config::mixed_functions;
use crate::harness::suites::method_discrepancies;
use crate::oracle::midpoint_strat;
use crate::paths::{gen_brownian, RngSeed};
use crate::series::sup_distance;
use crate::strat::{strat_integral, StratMethod};

const CHECKED_IN: &str = include_str!("../../tolerances.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSchedule {
    pub coefficient: f64,
    pub exponent: f64,
    pub calibration: Calibration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub orders: Vec<usize>,
    /// Tuple families studied at every order: `ones` and `mixed`.
    pub tuples: Vec<String>,
    pub horizon: f64,
    pub master_seed: u64,
    pub paths: usize,
    pub grids: Vec<usize>,
    /// Largest `discrepancy / (T/N)^p` seen over every case, path and grid.
    pub max_scaled_discrepancy: f64,
    pub median_scaled_discrepancy: f64,
    /// The same maximum restricted to f ≡ 1, n = 3.
    pub max_scaled_discrepancy_ones_n3: f64,
    pub safety_factor: f64,
}

impl ToleranceSchedule {
    /// The schedule shipped with the crate.
    pub fn calibrated() -> Self {
        serde_json::from_str(CHECKED_IN).expect("tolerances.json is valid")
    }

    pub fn tol(&self, grid: usize, horizon: f64) -> f64 {
        self.coefficient * (horizon / grid as f64).powf(self.exponent)
    }
}

/// Runs the refinement study: for every order `n ≤ 4`, both tuple families,
/// every path and every grid, the largest pairwise max-grid discrepancy among
/// the three methods (and against the midpoint sums for `n ≤ 3`), scaled by
/// `(T/N)^-1/2`. Coarser grids are subsamples of the finest path.
pub fn calibrate(
    paths: usize,
    master_seed: u64,
    grids: &[usize],
    safety_factor: f64,
    mode: Execution,
) -> Result<ToleranceSchedule> {
    const ORDERS: [usize; 4] = [1, 2, 3, 4];
    const EXPONENT: f64 = 0.5;
    let horizon = 1.0;
    let finest = *grids.iter().max().expect("at least one grid");
    let mut cases = Vec::new();
    for n in ORDERS {
        cases.push((n, "ones", FunctionTuple::ones(n, horizon)?));
        cases.push((n, "mixed", FunctionTuple::new(mixed_functions(n), horizon)?));
    }
    // Per path: (is the f ≡ 1, n = 3 case, scaled discrepancy).
    let per_path: Vec<Result<Vec<(bool, f64)>>> = map_indexed(paths, mode, |p| {
        let fine = gen_brownian(finest, horizon, RngSeed::new(master_seed, p as u64))?;
        let mut out = Vec::new();
        for &g in grids {
            let path = fine.coarsen(finest / g)?;
            for (n, label, tuple) in &cases {
                let mut worst = method_discrepancies(tuple, &path)?
                    .iter()
                    .fold(0.0f64, |m, &x| m.max(x));
                if *n <= 3 {
                    let gn = strat_integral(tuple, &path, StratMethod::GnSum)?;
                    worst = worst.max(sup_distance(&gn, &midpoint_strat(tuple, &path)?));
                }
                let scaled = worst / (horizon / g as f64).powf(EXPONENT);
                out.push((*n == 3 && *label == "ones", scaled));
            }
        }
        Ok(out)
    });
    let mut scaled = Vec::new();
    for r in per_path {
        scaled.extend(r?);
    }
    let all: Vec<f64> = scaled.iter().map(|s| s.1).collect();
    let max = all.iter().fold(0.0f64, |m, &x| m.max(x));
    let max_n3 = scaled
        .iter()
        .filter(|s| s.0)
        .fold(0.0f64, |m, s| m.max(s.1));
    Ok(ToleranceSchedule {
        coefficient: safety_factor * max,
        exponent: EXPONENT,
        calibration: Calibration {
            orders: ORDERS.to_vec(),
            tuples: vec!["ones".into(), "mixed".into()],
            horizon,
            master_seed,
            paths,
            grids: grids.to_vec(),
            max_scaled_discrepancy: max,
            median_scaled_discrepancy: super::stats::median(&all),
            max_scaled_discrepancy_ones_n3: max_n3,
            safety_factor,
        },
    })
}
