//! Strong piecewise-linear approximations of Brownian motion and the
//! multiple integrals they drive.
//!
//! The crate builds two families of continuous bounded-variation
//! approximations `W^(m)` of a Brownian path (polygonal interpolation and
//! the uniform transport process), evaluates the multiple ordinary integral
//! `J_n^(m)` of a simplex-supported product integrand `f_1(s_1)...f_n(s_n)`
//! against them, evaluates the multiple Stratonovich integral `I_n^S` of the
//! same integrand against the Brownian path through three Itô-based
//! representations, and measures how `J_n^(m)` approaches `I_n^S` as `m`
//! grows.
//!
//! Module map:
//!
//! - [`funcs`]: the integrand family with exact derivatives.
//! - [`paths`]: Brownian grid paths, polygonal and transport approximations.
//! - [`multi_index`]: the `{1,2}`-multi-indices summing to `n` and their weights.
//! - [`strat`]: iterated Itô/Lebesgue integrals and `I_n^S`.
//! - [`ordinary`]: pathwise Riemann–Stieltjes `J_n^(m)`, two ways.
//! - [`oracle`]: independent references used only for validation.
//! - [`harness`]: experiment suites, reports and CSV output.
//! - [`exec`]: per-path fan-out, parallel with the `parallel` feature.

pub mod error;
pub mod exec;
pub mod funcs;
pub mod harness;
pub mod multi_index;
pub mod oracle;
pub mod ordinary;
pub mod paths;
pub mod series;
pub mod strat;

pub use error::{Error, Result};
pub use funcs::{FunctionSpec, FunctionTuple};
pub use multi_index::MultiIndex;
pub use paths::{DiscreteBrownianPath, PiecewiseLinearPath, RngSeed};
pub use series::TimeSeries;
pub use strat::StratMethod;
