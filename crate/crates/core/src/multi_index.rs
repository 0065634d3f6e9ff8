//! Multi-indices over `{1, 2}` summing to `n`.
//!
//! An entry 1 stands for an Itô step `dW` consuming one integrand factor;
//! an entry 2 for a Lebesgue step `ds` consuming two. Summing
//! `2^(q-n) I_(α)` over the whole family gives the Stratonovich integral.

use std::fmt;

use crate::error::{Error, Result};

/// Largest order accepted by [`enumerate_gn`]; `|G_10| = 89`.
pub const MAX_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::argument("multi-index must be non-empty"));
        }
        if let Some(bad) = entries.iter().find(|&&a| a != 1 && a != 2) {
            return Err(Error::argument(format!(
                "multi-index entry {bad} not in {{1, 2}}"
            )));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Number of entries `q`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n = Σ α_i`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `2^(q - n)`.
    pub fn weight(&self) -> f64 {
        let deficit = (self.order() - self.len()) as i32;
        0.5f64.powi(deficit)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Every `{1,2}`-sequence summing to `n`, in lexicographic order.
pub fn enumerate_gn(n: usize) -> Result<Vec<MultiIndex>> {
    if n < 1 {
        return Err(Error::argument("order n must be at least 1"));
    }
    if n > MAX_ORDER {
        return Err(Error::argument(format!(
            "order {n} exceeds the cap {MAX_ORDER}"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    extend(n, &mut prefix, &mut out);
    Ok(out)
}

fn extend(remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
    if remaining == 0 {
        out.push(MultiIndex(prefix.clone()));
        return;
    }
    for step in [1u8, 2] {
        if step as usize <= remaining {
            prefix.push(step);
            extend(remaining - step as usize, prefix, out);
            prefix.pop();
        }
    }
}
