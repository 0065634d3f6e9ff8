//! Sampled real functions of time.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Values of a process sampled at sorted times on `[0, T]`.
///
/// The time grid is shared between every level of an iterated integral, so
/// it is reference counted.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Arc<[f64]>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Arc<[f64]>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::argument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::argument("empty time series"));
        }
        Ok(Self { times, values })
    }

    pub fn constant(times: Arc<[f64]>, c: f64) -> Self {
        let values = vec![c; times.len()];
        Self { times, values }
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

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            times: Arc::clone(&self.times),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Linear interpolation at `t`, clamped to the end values.
    pub fn interpolate(&self, t: f64) -> f64 {
        let ts = &self.times;
        let i = ts.partition_point(|&x| x <= t);
        if i == 0 {
            return self.values[0];
        }
        if i == ts.len() {
            return self.terminal();
        }
        let (t0, t1) = (ts[i - 1], ts[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub(crate) fn same_grid(&self, other: &[f64]) -> bool {
        std::ptr::eq(self.times.as_ptr(), other.as_ptr()) || *self.times == *other
    }

    pub(crate) fn require_grid(&self, grid: &[f64], what: &str) -> Result<()> {
        if self.same_grid(grid) {
            Ok(())
        } else {
            Err(Error::argument(format!("{what}: time grid mismatch")))
        }
    }
}

/// Maximum pointwise distance of two sampled functions over the union of
/// their sample times, each side linearly interpolated.
pub fn sup_distance(a: &TimeSeries, b: &TimeSeries) -> f64 {
    if a.same_grid(b.times()) {
        return a
            .values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()));
    }
    let mut worst: f64 = 0.0;
    let (ta, tb) = (a.times(), b.times());
    let (mut i, mut j) = (0, 0);
    let mut cursor_a = Cursor::default();
    let mut cursor_b = Cursor::default();
    while i < ta.len() || j < tb.len() {
        let t = match (ta.get(i), tb.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        let d = (cursor_a.eval(a, t) - cursor_b.eval(b, t)).abs();
        worst = worst.max(d);
    }
    worst
}

/// Forward-only interpolation cursor for increasing query times.
#[derive(Default)]
struct Cursor {
    idx: usize,
}

impl Cursor {
    fn eval(&mut self, s: &TimeSeries, t: f64) -> f64 {
        let ts = s.times();
        while self.idx + 1 < ts.len() && ts[self.idx + 1] <= t {
            self.idx += 1;
        }
        let i = self.idx;
        if t <= ts[0] {
            return s.values()[0];
        }
        if i + 1 >= ts.len() {
            return s.terminal();
        }
        let (t0, t1) = (ts[i], ts[i + 1]);
        let (v0, v1) = (s.values()[i], s.values()[i + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}
