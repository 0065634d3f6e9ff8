//! Multiple Stratonovich integrals on a Brownian grid path.
//!
//! Everything here is built from two discrete primitives: a left-point Itô
//! sum and a trapezoid Lebesgue integral. The Stratonovich integral `I_n^S`
//! is then assembled three ways:
//!
//! - [`StratMethod::GnSum`]: `Σ_{α ∈ G_n} 2^(q-n) I_(α)`.
//! - [`StratMethod::Recursion`]: `I_k^S = ∫ f_k I_{k-1}^S dW + ½ ∫ f_k f_{k-1} I_{k-2}^S ds`.
//! - [`StratMethod::Expansion`]: the Itô-formula expansion in powers of `W`,
//!   with lower orders taken from the recursion.
//!
//! Stratonovich sums (midpoint rule) are deliberately absent; they live in
//! [`crate::oracle`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::{FunctionSpec, FunctionTuple};
use crate::multi_index::{enumerate_gn, MultiIndex};
use crate::paths::DiscreteBrownianPath;
use crate::series::TimeSeries;

/// A process sampled on the grid of a [`DiscreteBrownianPath`].
pub type GridFunction = TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratMethod {
    GnSum,
    Recursion,
    Expansion,
}

impl StratMethod {
    pub const ALL: [StratMethod; 3] = [
        StratMethod::GnSum,
        StratMethod::Recursion,
        StratMethod::Expansion,
    ];
}

impl fmt::Display for StratMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StratMethod::GnSum => "gn_sum",
            StratMethod::Recursion => "recursion",
            StratMethod::Expansion => "expansion",
        };
        f.write_str(name)
    }
}

fn sample(f: &FunctionSpec, times: &[f64]) -> Vec<f64> {
    times.iter().map(|&t| f.value(t)).collect()
}

fn check_horizon(tuple: &FunctionTuple, path: &DiscreteBrownianPath) -> Result<()> {
    let (a, b) = (tuple.horizon(), path.horizon());
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(Error::argument(format!(
            "tuple horizon {a} differs from path horizon {b}"
        )));
    }
    Ok(())
}

/// `out(t_j) = Σ_{i<j} coeff(t_i) inner(t_i) ΔW_i`.
fn ito_sum(coeff: &[f64], inner: &[f64], w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 0..w.len() - 1 {
        acc += coeff[i] * inner[i] * (w[i + 1] - w[i]);
        out.push(acc);
    }
    out
}

/// Cumulative trapezoid of `coeff · inner` over `times`.
fn trapezoid_cumulative(coeff: &[f64], inner: &[f64], times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 0..times.len() - 1 {
        let h = times[i + 1] - times[i];
        acc += 0.5 * h * (coeff[i] * inner[i] + coeff[i + 1] * inner[i + 1]);
        out.push(acc);
    }
    out
}

fn grid_series(path: &DiscreteBrownianPath, values: Vec<f64>) -> GridFunction {
    TimeSeries::new(Arc::clone(path.shared_times()), values).expect("grid-sized by construction")
}

/// Left-point Itô integral `∫_0^t f(s) inner(s) dW(s)`.
pub fn ito_step_integral(
    f: &FunctionSpec,
    inner: &GridFunction,
    path: &DiscreteBrownianPath,
) -> Result<GridFunction> {
    inner.require_grid(path.times(), "ito_step_integral")?;
    let coeff = sample(f, path.times());
    Ok(grid_series(
        path,
        ito_sum(&coeff, inner.values(), path.values()),
    ))
}

/// Trapezoid integral `∫_0^t f(s) g(s) inner(s) ds`.
pub fn lebesgue_step_integral(
    f: &FunctionSpec,
    g: &FunctionSpec,
    inner: &GridFunction,
    path: &DiscreteBrownianPath,
) -> Result<GridFunction> {
    inner.require_grid(path.times(), "lebesgue_step_integral")?;
    let coeff: Vec<f64> = path
        .times()
        .iter()
        .map(|&t| f.value(t) * g.value(t))
        .collect();
    Ok(grid_series(
        path,
        trapezoid_cumulative(&coeff, inner.values(), path.times()),
    ))
}

/// `I_(α)(f_1, ..., f_n)` on the grid, folding α from the left.
pub fn eval_i_alpha(
    alpha: &MultiIndex,
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
) -> Result<GridFunction> {
    check_horizon(tuple, path)?;
    if alpha.order() != tuple.order() {
        return Err(Error::argument(format!(
            "multi-index {alpha} has order {} but the tuple has {} functions",
            alpha.order(),
            tuple.order()
        )));
    }
    let mut inner = TimeSeries::constant(Arc::clone(path.shared_times()), 1.0);
    let mut next = 1;
    for &entry in alpha.entries() {
        inner = if entry == 1 {
            next += 1;
            ito_step_integral(tuple.get(next - 1), &inner, path)?
        } else {
            next += 2;
            lebesgue_step_integral(tuple.get(next - 1), tuple.get(next - 2), &inner, path)?
        };
    }
    Ok(inner)
}

/// `I_0^S ≡ 1, I_1^S, ..., I_n^S` by the two-term recursion.
pub fn stratonovich_levels(
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
) -> Result<Vec<GridFunction>> {
    check_horizon(tuple, path)?;
    let times = path.times();
    let w = path.values();
    let sampled: Vec<Vec<f64>> = tuple.funcs().iter().map(|f| sample(f, times)).collect();

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(tuple.order() + 1);
    levels.push(vec![1.0; times.len()]);
    for k in 1..=tuple.order() {
        let fk = &sampled[k - 1];
        let mut next = ito_sum(fk, &levels[k - 1], w);
        if k >= 2 {
            // Itô-Stratonovich correction ½ ∫ f_k f_{k-1} I_{k-2}^S ds.
            let coeff: Vec<f64> = fk.iter().zip(&sampled[k - 2]).map(|(a, b)| a * b).collect();
            let correction = trapezoid_cumulative(&coeff, &levels[k - 2], times);
            next.iter_mut()
                .zip(correction)
                .for_each(|(v, c)| *v += 0.5 * c);
        }
        levels.push(next);
    }
    Ok(levels.into_iter().map(|v| grid_series(path, v)).collect())
}

/// Top level of the expansion
/// `Σ_k (-1)^(k+1) I_{n-k}(t) W(t)^k/k! g_k(t) + Σ_k (-1)^k ∫ I_{n-k} W^k/k! g_k' ds`,
/// `g_k = f_n ... f_{n+1-k}`, from given lower levels `I_0 .. I_{n-1}`.
fn expansion_top(
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
    lower: &[GridFunction],
) -> GridFunction {
    let n = tuple.order();
    let times = path.times();
    let w = path.values();
    let len = times.len();
    let mut boundary = vec![0.0; len];
    let mut drift_integrand = vec![0.0; len];
    let mut w_power = vec![1.0; len];
    let mut factorial = 1.0;
    for k in 1..=n {
        factorial *= k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let below = lower[n - k].values();
        for j in 0..len {
            w_power[j] *= w[j];
            let (g, dg) = tuple.suffix_product_unchecked(k, times[j]);
            let common = below[j] * w_power[j] / factorial;
            boundary[j] += sign * common * g;
            drift_integrand[j] -= sign * common * dg;
        }
    }
    let ones = vec![1.0; len];
    let drift = trapezoid_cumulative(&drift_integrand, &ones, times);
    let values = boundary.iter().zip(drift).map(|(b, d)| b + d).collect();
    grid_series(path, values)
}

/// `I_n^S(f_1, ..., f_n)` on the whole grid.
pub fn strat_integral(
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
    method: StratMethod,
) -> Result<GridFunction> {
    check_horizon(tuple, path)?;
    let n = tuple.order();
    match method {
        StratMethod::GnSum => {
            let mut total = vec![0.0; path.times().len()];
            for alpha in enumerate_gn(n)? {
                let weight = alpha.weight();
                let term = eval_i_alpha(&alpha, tuple, path)?;
                total
                    .iter_mut()
                    .zip(term.values())
                    .for_each(|(acc, v)| *acc += weight * v);
            }
            Ok(grid_series(path, total))
        }
        StratMethod::Recursion => Ok(stratonovich_levels(tuple, path)?.pop().unwrap()),
        StratMethod::Expansion => {
            let lower = if n == 1 {
                stratonovich_levels(tuple, path)?
            } else {
                stratonovich_levels(&tuple.prefix(n - 1)?, path)?
            };
            Ok(expansion_top(tuple, path, &lower[..n]))
        }
    }
}

/// All three representations of `I_n^S`, in [`StratMethod::ALL`] order.
pub fn strat_all_methods(
    tuple: &FunctionTuple,
    path: &DiscreteBrownianPath,
) -> Result<[GridFunction; 3]> {
    let n = tuple.order();
    let gn = strat_integral(tuple, path, StratMethod::GnSum)?;
    let mut levels = stratonovich_levels(tuple, path)?;
    let expansion = expansion_top(tuple, path, &levels[..n]);
    let recursion = levels.pop().unwrap();
    Ok([gn, recursion, expansion])
}
