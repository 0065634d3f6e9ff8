//! Brownian grid paths and the piecewise-linear approximations built from
//! them: polygonal interpolation and the uniform transport process.
//!
//! Random draws come from ChaCha8 (`rand_chacha` 0.9) keyed by a
//! [`RngSeed`]: the master seed seeds the generator and the stream index
//! selects one of its 2^64 independent streams. Gaussian increments use the
//! ziggurat `StandardNormal` and inter-arrival gaps the `Exp` sampler of
//! `rand_distr` 0.5, so a seed replays the same path on any thread.

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::check_time;

/// Knots closer than this (time units) are merged.
pub const KNOT_TOLERANCE: f64 = 1e-12;

/// Seed of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// `N + 1` equispaced times on `[0, T]`, last one exactly `T`.
pub(crate) fn uniform_times(cells: usize, horizon: f64) -> Vec<f64> {
    let mut times: Vec<f64> = (0..=cells)
        .map(|j| horizon * j as f64 / cells as f64)
        .collect();
    times[cells] = horizon;
    times
}

/// Brownian motion sampled at `t_j = j T / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBrownianPath {
    times: Arc<[f64]>,
    values: Vec<f64>,
}

impl DiscreteBrownianPath {
    /// Wraps given samples on the uniform grid of `values.len() - 1` cells.
    pub fn from_values(horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::argument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::argument("a grid path needs at least two samples"));
        }
        if values[0] != 0.0 {
            return Err(Error::argument("a Brownian path must start at 0"));
        }
        let times = uniform_times(values.len() - 1, horizon).into();
        Ok(Self { times, values })
    }

    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn step(&self) -> f64 {
        self.horizon() / self.grid_size() as f64
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn shared_times(&self) -> &Arc<[f64]> {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.grid_size()]
    }

    /// Keeps every `factor`-th sample; the coarse path is the same Brownian
    /// realization observed on a grid of `N / factor` cells.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.grid_size().is_multiple_of(factor) {
            return Err(Error::argument(format!(
                "coarsening factor {factor} does not divide N = {}",
                self.grid_size()
            )));
        }
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::from_values(self.horizon(), values)
    }
}

/// Cumulative sum of `N` independent `N(0, T/N)` increments.
pub fn gen_brownian(grid_size: usize, horizon: f64, seed: RngSeed) -> Result<DiscreteBrownianPath> {
    if grid_size == 0 {
        return Err(Error::argument("grid size N must be at least 1"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::argument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let sd = (horizon / grid_size as f64).sqrt();
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(grid_size + 1);
    let mut w = 0.0;
    values.push(w);
    for _ in 0..grid_size {
        let z: f64 = StandardNormal.sample(&mut rng);
        w += sd * z;
        values.push(w);
    }
    DiscreteBrownianPath::from_values(horizon, values)
}

/// Continuous path, linear between strictly increasing knots `0 = t_0 < ... < t_M = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPath {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PiecewiseLinearPath {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::argument(format!(
                "need at least two knots with matching values, got {} knots and {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] != 0.0 {
            return Err(Error::argument("first knot must be 0"));
        }
        if knots
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::argument("knots must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) || !knots[knots.len() - 1].is_finite() {
            return Err(Error::argument("non-finite knot or value"));
        }
        let slopes = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, w)| (w[1] - w[0]) / (t[1] - t[0]))
            .collect();
        Ok(Self {
            knots,
            values,
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn horizon(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn num_segments(&self) -> usize {
        self.slopes.len()
    }

    /// Index of the segment containing `t`; the right end belongs to the last segment.
    pub fn segment_of(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= t);
        i.saturating_sub(1).min(self.num_segments() - 1)
    }

    /// `W^(m)(t)` by linear interpolation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t, self.horizon())?;
        Ok(self.value_at(t))
    }

    #[inline]
    pub(crate) fn value_at(&self, t: f64) -> f64 {
        let i = self.segment_of(t);
        if t >= self.knots[i + 1] {
            return self.values[i + 1];
        }
        self.values[i] + self.slopes[i] * (t - self.knots[i])
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes the knots as CSV with header `t,w`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,w")?;
        for (t, w) in self.knots.iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{w:.16e}")?;
        }
        Ok(())
    }
}

/// Linear interpolation of the grid path through the `m + 1` times `j T / m`.
pub fn polygonal(path: &DiscreteBrownianPath, m: usize) -> Result<PiecewiseLinearPath> {
    let n = path.grid_size();
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::argument(format!("m = {m} does not divide N = {n}")));
    }
    let stride = n / m;
    let knots = path.times().iter().step_by(stride).copied().collect();
    let values = path.values().iter().step_by(stride).copied().collect();
    PiecewiseLinearPath::new(knots, values)
}

/// Samples the uniform transport process `sqrt(m) (-1)^A ∫_0^t (-1)^{N(um)} du`
/// on `[0, T]`.
pub fn gen_transport(m: f64, horizon: f64, seed: RngSeed) -> Result<PiecewiseLinearPath> {
    check_transport_args(m, horizon)?;
    let mut rng = seed.rng();
    let flipped: bool = rng.random();
    let gaps = Exp::new(m).map_err(|e| Error::argument(format!("rate {m}: {e}")))?;
    let mut jumps = Vec::new();
    let mut clock = 0.0;
    loop {
        clock += gaps.sample(&mut rng);
        if clock >= horizon {
            break;
        }
        jumps.push(clock);
    }
    transport_from_jumps(m, horizon, flipped, &jumps)
}

/// Transport path with a given sign flag `A` and jump times of `N(um)`.
///
/// Slope on the k-th inter-jump segment is `sqrt(m) (-1)^(A + k)`.
pub fn transport_from_jumps(
    m: f64,
    horizon: f64,
    flipped: bool,
    jumps: &[f64],
) -> Result<PiecewiseLinearPath> {
    check_transport_args(m, horizon)?;
    let speed = m.sqrt();
    let mut sign = if flipped { -1.0 } else { 1.0 };
    let mut knots = vec![0.0];
    let mut values = vec![0.0];
    let (mut last_t, mut last_w) = (0.0, 0.0);
    for &tau in jumps {
        if !(tau > 0.0 && tau < horizon) {
            return Err(Error::argument(format!(
                "jump time {tau} outside (0, {horizon})"
            )));
        }
        if tau < last_t {
            return Err(Error::argument("jump times must be sorted"));
        }
        if tau - last_t > KNOT_TOLERANCE {
            last_w += sign * speed * (tau - last_t);
            last_t = tau;
            knots.push(tau);
            values.push(last_w);
        }
        sign = -sign;
    }
    let end = last_w + sign * speed * (horizon - last_t);
    if horizon - last_t > KNOT_TOLERANCE {
        knots.push(horizon);
        values.push(end);
    } else {
        // A jump within tolerance of T: stretch the last knot onto T.
        *knots.last_mut().unwrap() = horizon;
        *values.last_mut().unwrap() = end;
    }
    let mut path = PiecewiseLinearPath::new(knots, values)?;
    // Differencing knot values loses digits on short segments; the slopes
    // are known exactly.
    let first = if flipped { -speed } else { speed };
    for (k, b) in path.slopes.iter_mut().enumerate() {
        *b = if k % 2 == 0 { first } else { -first };
    }
    Ok(path)
}

fn check_transport_args(m: f64, horizon: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::argument(format!(
            "transport rate m must be positive, got {m}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::argument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(())
}

/// Sorted union of the path knots with a uniform mesh of width at most `delta`.
pub fn refine_grid(path: &PiecewiseLinearPath, delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::argument(format!(
            "mesh width must be positive, got {delta}"
        )));
    }
    let horizon = path.horizon();
    let cells = (horizon / delta).ceil().max(1.0) as usize;
    let mesh = uniform_times(cells, horizon);
    Ok(merge_times(path.knots(), &mesh))
}

/// Merges two sorted time lists; a mesh time within tolerance of a knot is
/// dropped in favour of the knot.
fn merge_times(knots: &[f64], mesh: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(knots.len() + mesh.len());
    let (mut i, mut j) = (0, 0);
    while i < knots.len() || j < mesh.len() {
        let take_knot = match (knots.get(i), mesh.get(j)) {
            (Some(&k), Some(&s)) => k <= s + KNOT_TOLERANCE,
            (Some(_), None) => true,
            _ => false,
        };
        if take_knot {
            let k = knots[i];
            i += 1;
            while mesh.get(j).is_some_and(|&s| s <= k + KNOT_TOLERANCE) {
                j += 1;
            }
            if let Some(prev) = out.last_mut() {
                if k - *prev <= KNOT_TOLERANCE {
                    *prev = k;
                    continue;
                }
            }
            out.push(k);
        } else {
            let s = mesh[j];
            j += 1;
            if out.last().is_some_and(|&prev| s - prev <= KNOT_TOLERANCE) {
                continue;
            }
            out.push(s);
        }
    }
    out
}
