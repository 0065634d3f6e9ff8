use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::{FunctionSpec, FunctionTuple};
use crate::multi_index::MAX_ORDER;
use crate::ordinary::DEFAULT_MESH_CELLS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Polygonal,
    Transport,
}

/// One experiment, as read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(alias = "T")]
    pub horizon: f64,
    pub n: usize,
    pub functions: Vec<FunctionSpec>,
    /// Brownian grid size `N`.
    #[serde(alias = "N")]
    pub grid: usize,
    /// Quadrature mesh for ordinary integrals; defaults to `T / 2^14`.
    #[serde(default)]
    pub delta: Option<f64>,
    pub m_values: Vec<f64>,
    pub num_paths: usize,
    pub master_seed: u64,
    pub family: Family,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Wall-clock timings make output nondeterministic, so they are opt-in;
    /// otherwise `runtime_ms` is written as 0.
    #[serde(default)]
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::config("<file>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::config("horizon", "must be positive"));
        }
        if self.n == 0 || self.n > MAX_ORDER {
            return Err(Error::config("n", format!("must be in 1..={MAX_ORDER}")));
        }
        if self.functions.len() != self.n {
            return Err(Error::config(
                "functions",
                format!(
                    "expected {} functions, got {}",
                    self.n,
                    self.functions.len()
                ),
            ));
        }
        for f in &self.functions {
            f.validate()
                .map_err(|e| Error::config("functions", e.to_string()))?;
        }
        if self.grid == 0 {
            return Err(Error::config("grid", "must be at least 1"));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::config("delta", "must be positive"));
            }
        }
        if self.m_values.is_empty() {
            return Err(Error::config("m_values", "must be non-empty"));
        }
        if self.m_values.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::config("m_values", "every m must be positive"));
        }
        if self.family == Family::Polygonal {
            for &m in &self.m_values {
                if m.fract() != 0.0 || !self.grid.is_multiple_of(m as usize) {
                    return Err(Error::config(
                        "m_values",
                        format!("m = {m} must be an integer dividing N = {}", self.grid),
                    ));
                }
            }
        }
        if self.num_paths == 0 {
            return Err(Error::config("num_paths", "must be at least 1"));
        }
        Ok(())
    }

    pub fn tuple(&self) -> Result<FunctionTuple> {
        FunctionTuple::new(self.functions.clone(), self.horizon)
            .map_err(|e| Error::config("functions", e.to_string()))
    }

    pub fn delta(&self) -> f64 {
        self.delta
            .unwrap_or(self.horizon / DEFAULT_MESH_CELLS as f64)
    }
}

/// `[1 + t/2, sin(2t + 0.3), e^{t/2}, t^2 - t + 1/2]`, truncated to `n`.
pub fn mixed_functions(n: usize) -> Vec<FunctionSpec> {
    let all = [
        FunctionSpec::Poly {
            coeffs: vec![1.0, 0.5],
        },
        FunctionSpec::Sin { a: 2.0, b: 0.3 },
        FunctionSpec::Exp { a: 0.5 },
        FunctionSpec::Poly {
            coeffs: vec![0.5, -1.0, 1.0],
        },
    ];
    all.iter().cycle().take(n).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            horizon: 1.0,
            n: 2,
            functions: vec![FunctionSpec::one(); 2],
            grid: 1024,
            delta: None,
            m_values: vec![16.0, 32.0],
            num_paths: 4,
            master_seed: 1,
            family: Family::Polygonal,
            output: None,
            record_timings: false,
        }
    }

    fn field_of(cfg: &ExperimentConfig) -> String {
        match cfg.validate() {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn valid_and_defaults() {
        let cfg = base();
        cfg.validate().unwrap();
        assert_eq!(cfg.delta(), 1.0 / 16384.0);
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = base();
        c.functions.pop();
        assert_eq!(field_of(&c), "functions");

        let mut c = base();
        c.m_values = vec![24.0];
        assert_eq!(field_of(&c), "m_values");

        let mut c = base();
        c.m_values = vec![2.5];
        assert_eq!(field_of(&c), "m_values");

        let mut c = base();
        c.horizon = 0.0;
        assert_eq!(field_of(&c), "horizon");

        let mut c = base();
        c.num_paths = 0;
        assert_eq!(field_of(&c), "num_paths");
    }

    #[test]
    fn transport_allows_real_rates() {
        let mut c = base();
        c.family = Family::Transport;
        c.m_values = vec![2.5, 10.0];
        c.validate().unwrap();
    }

    #[test]
    fn parses_json_with_short_names() {
        let cfg = ExperimentConfig::from_json(
            r#"{"T": 1.0, "n": 1, "functions": [{"type":"exp","a":1}], "N": 64,
                "m_values": [8], "num_paths": 2, "master_seed": 3, "family": "polygonal"}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid, 64);
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"T": 1.0}"#),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn mixed_functions_cycle() {
        assert_eq!(mixed_functions(3).len(), 3);
        assert_eq!(mixed_functions(5)[4], mixed_functions(1)[0]);
    }
}
