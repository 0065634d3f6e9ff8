//! Integrand family: polynomials, shifted sines and exponentials, each with
//! an analytic derivative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed at the ends of `[0, T]` when checking evaluation times.
pub(crate) const TIME_SLACK: f64 = 1e-12;

/// One coordinate integrand `f_i`, continuously differentiable on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FunctionSpec {
    /// `a_0 + a_1 t + ... + a_d t^d`.
    Poly { coeffs: Vec<f64> },
    /// `sin(a t + b)`.
    Sin { a: f64, b: f64 },
    /// `exp(a t)`.
    Exp { a: f64 },
}

impl FunctionSpec {
    pub fn constant(c: f64) -> Self {
        FunctionSpec::Poly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// True for `Poly` whose only nonzero coefficient is the constant 1.
    pub fn is_unit(&self) -> bool {
        match self {
            FunctionSpec::Poly { coeffs } => {
                coeffs.first() == Some(&1.0) && coeffs[1..].iter().all(|&c| c == 0.0)
            }
            _ => false,
        }
    }

    /// `f(t)` without a domain check.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c),
            FunctionSpec::Sin { a, b } => (a * t + b).sin(),
            FunctionSpec::Exp { a } => (a * t).exp(),
        }
    }

    /// `f'(t)` without a domain check.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * t + i as f64 * c),
            FunctionSpec::Sin { a, b } => a * (a * t + b).cos(),
            FunctionSpec::Exp { a } => a * (a * t).exp(),
        }
    }

    /// `f''(t)` without a domain check.
    #[inline]
    pub fn second_derivative(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * t + (i * (i - 1)) as f64 * c),
            FunctionSpec::Sin { a, b } => -a * a * (a * t + b).sin(),
            FunctionSpec::Exp { a } => a * a * (a * t).exp(),
        }
    }

    pub fn eval(&self, t: f64, horizon: f64) -> Result<f64> {
        check_time(t, horizon)?;
        Ok(self.value(t))
    }

    pub fn deriv_eval(&self, t: f64, horizon: f64) -> Result<f64> {
        check_time(t, horizon)?;
        Ok(self.derivative(t))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let finite = match self {
            FunctionSpec::Poly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::argument("polynomial needs at least one coefficient"));
                }
                coeffs.iter().all(|c| c.is_finite())
            }
            FunctionSpec::Sin { a, b } => a.is_finite() && b.is_finite(),
            FunctionSpec::Exp { a } => a.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::argument(format!("non-finite parameter in {self:?}")))
        }
    }
}

pub(crate) fn check_time(t: f64, horizon: f64) -> Result<()> {
    let slack = TIME_SLACK * horizon.max(1.0);
    if t.is_nan() || t < -slack || t > horizon + slack {
        Err(Error::Domain { t, horizon })
    } else {
        Ok(())
    }
}

/// The ordered integrands `(f_1, ..., f_n)` on the horizon `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionTuple {
    funcs: Vec<FunctionSpec>,
    horizon: f64,
}

impl FunctionTuple {
    pub fn new(funcs: Vec<FunctionSpec>, horizon: f64) -> Result<Self> {
        if funcs.is_empty() {
            return Err(Error::argument("function tuple must be non-empty"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::argument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        for f in &funcs {
            f.validate()?;
        }
        Ok(Self { funcs, horizon })
    }

    /// `n` copies of the constant 1.
    pub fn ones(n: usize, horizon: f64) -> Result<Self> {
        Self::new(vec![FunctionSpec::one(); n], horizon)
    }

    pub fn order(&self) -> usize {
        self.funcs.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn funcs(&self) -> &[FunctionSpec] {
        &self.funcs
    }

    /// `f_i` with the 1-based index used in the integral notation.
    pub fn get(&self, i: usize) -> &FunctionSpec {
        &self.funcs[i - 1]
    }

    /// The first `k` functions, as a tuple of order `k`.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.order() {
            return Err(Error::argument(format!(
                "prefix length {k} out of 1..={}",
                self.order()
            )));
        }
        Ok(Self {
            funcs: self.funcs[..k].to_vec(),
            horizon: self.horizon,
        })
    }

    /// Scales `f_1` by `c`. Only a polynomial head stays inside the family.
    pub fn with_scaled_head(&self, c: f64) -> Result<Self> {
        let mut funcs = self.funcs.clone();
        match &mut funcs[0] {
            FunctionSpec::Poly { coeffs } => coeffs.iter_mut().for_each(|a| *a *= c),
            other => {
                return Err(Error::argument(format!(
                    "cannot scale non-polynomial head {other:?}"
                )))
            }
        }
        Self::new(funcs, self.horizon)
    }

    pub fn all_unit(&self) -> bool {
        self.funcs.iter().all(FunctionSpec::is_unit)
    }

    /// Value and derivative of `f_n f_{n-1} ... f_{n+1-k}` at `t`.
    pub fn suffix_product(&self, k: usize, t: f64) -> Result<(f64, f64)> {
        let n = self.order();
        if k == 0 || k > n {
            return Err(Error::argument(format!("suffix length {k} out of 1..={n}")));
        }
        check_time(t, self.horizon)?;
        Ok(self.suffix_product_unchecked(k, t))
    }

    #[inline]
    pub(crate) fn suffix_product_unchecked(&self, k: usize, t: f64) -> (f64, f64) {
        let n = self.order();
        let mut value = 1.0;
        let mut deriv = 0.0;
        for f in self.funcs[n - k..].iter().rev() {
            let (fv, fd) = (f.value(t), f.derivative(t));
            deriv = deriv * fv + value * fd;
            value *= fv;
        }
        (value, deriv)
    }

    /// `(g_k, g_k', g_k'')` for the same suffix product.
    #[inline]
    pub(crate) fn suffix_product2_unchecked(&self, k: usize, t: f64) -> (f64, f64, f64) {
        let n = self.order();
        let (mut v, mut d, mut dd) = (1.0, 0.0, 0.0);
        for f in self.funcs[n - k..].iter().rev() {
            let (fv, fd, fdd) = (f.value(t), f.derivative(t), f.second_derivative(t));
            dd = dd * fv + 2.0 * d * fd + v * fdd;
            d = d * fv + v * fd;
            v *= fv;
        }
        (v, d, dd)
    }
}
