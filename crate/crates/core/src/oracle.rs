//! Independent references for the evaluators in [`crate::strat`] and
//! [`crate::ordinary`]. Nothing outside the harness and tests uses them.

use crate::error::{Error, Result};
use crate::funcs::FunctionTuple;
use crate::paths::{DiscreteBrownianPath, PiecewiseLinearPath};
use crate::series::TimeSeries;
use crate::strat::GridFunction;

/// Nested trapezoid quadrature over the simplex `0 ≤ s_1 ≤ ... ≤ s_n ≤ T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexQuadSpec {
    n: usize,
    mesh: usize,
}

impl SimplexQuadSpec {
    pub const MAX_ORDER: usize = 3;

    pub fn new(n: usize, mesh: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_ORDER {
            return Err(Error::argument(format!(
                "simplex quadrature supports orders 1..={}, got {n}",
                Self::MAX_ORDER
            )));
        }
        if mesh < 2 {
            return Err(Error::argument(format!(
                "mesh must be at least 2, got {mesh}"
            )));
        }
        Ok(Self { n, mesh })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mesh(&self) -> usize {
        self.mesh
    }
}

/// `∫...∫_{s_1 ≤ ... ≤ s_n ≤ T} Π f_i(s_i) dW^(m)(s_i)` by brute force.
///
/// Nodes are the uniform `M`-mesh together with all knots. Each inner
/// integral `∫_0^{x_k}` is summed afresh from zero for every node `x_k`
/// rather than accumulated, so the cost is `O(M^2)` per level.
pub fn brute_force_j(
    tuple: &FunctionTuple,
    path: &PiecewiseLinearPath,
    spec: SimplexQuadSpec,
) -> Result<f64> {
    if tuple.order() != spec.order() {
        return Err(Error::argument(format!(
            "spec order {} but {} functions",
            spec.order(),
            tuple.order()
        )));
    }
    let horizon = path.horizon();
    let mut nodes: Vec<f64> = (0..=spec.mesh())
        .map(|j| horizon * j as f64 / spec.mesh() as f64)
        .chain(path.knots().iter().copied())
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|b, a| (*b - *a).abs() <= 1e-12);
    *nodes.last_mut().unwrap() = horizon;

    // Increment of the path over each cell; the path is linear inside a cell.
    let rise: Vec<f64> = nodes
        .windows(2)
        .map(|c| path.eval(c[1]).and_then(|b| Ok(b - path.eval(c[0])?)))
        .collect::<Result<_>>()?;

    let mut inner = vec![1.0; nodes.len()];
    for level in 1..=spec.order() {
        let f = tuple.get(level);
        let integrand: Vec<f64> = nodes
            .iter()
            .zip(&inner)
            .map(|(&s, v)| f.value(s) * v)
            .collect();
        let cell = |c: usize| 0.5 * rise[c] * (integrand[c] + integrand[c + 1]);
        if level == spec.order() {
            return Ok((0..rise.len()).map(cell).sum());
        }
        inner = (0..nodes.len())
            .map(|k| (0..k).map(cell).sum::<f64>())
            .collect();
    }
    unreachable!("loop returns at the top level")
}

/// `p_n(w, t)`: `p_0 = 1`, `p_1 = w`, `p_{k+1} = (w p_k - t p_{k-1}) / (k + 1)`.
///
/// Equals the n-fold iterated Itô integral of 1 when `w = W(t)`.
pub fn hermite_ito_closed_form(n: usize, w: f64, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, w);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = (w * cur - t * prev) / (k as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Iterated Stratonovich integral by midpoint-rule Stieltjes sums:
/// each step adds `½ (h(t_{j-1}) + h(t_j)) ΔW_j` with `h = f_k Y_{k-1}`.
pub fn midpoint_strat(tuple: &FunctionTuple, path: &DiscreteBrownianPath) -> Result<GridFunction> {
    if (tuple.horizon() - path.horizon()).abs() > 1e-12 * tuple.horizon() {
        return Err(Error::argument("tuple and path horizons differ"));
    }
    let times = path.times();
    let w = path.values();
    let mut y = vec![1.0; times.len()];
    for f in tuple.funcs() {
        let h: Vec<f64> = times.iter().zip(&y).map(|(&t, v)| f.value(t) * v).collect();
        let mut acc = 0.0;
        y[0] = 0.0;
        for j in 1..times.len() {
            acc += 0.5 * (h[j - 1] + h[j]) * (w[j] - w[j - 1]);
            y[j] = acc;
        }
    }
    TimeSeries::new(std::sync::Arc::clone(path.shared_times()), y)
}

/// `Var W^(m)(t) = t - (1 - e^{-2mt}) / (2m)` for the transport process.
///
/// From `E[(-1)^{N(um)} (-1)^{N(vm)}] = e^{-2m|u-v|}` integrated over `[0,t]^2`
/// and multiplied by `m`.
pub fn transport_variance(m: f64, t: f64) -> f64 {
    let x = 2.0 * m * t;
    // -expm1(-x) keeps precision when m t is small.
    t + f64::exp_m1(-x) / (2.0 * m)
}

/// `E[W(T)^p]` for Brownian `W`: `T^{p/2} (p-1)!!` for even `p`, else 0.
pub fn gaussian_moment(p: u32, horizon: f64) -> f64 {
    if p % 2 == 1 {
        return 0.0;
    }
    let double_factorial: f64 = (1..p).step_by(2).map(|k| k as f64).product();
    horizon.powi(p as i32 / 2) * double_factorial
}
