use std::path::PathBuf;

use crate::error::CliError;
use crate::report::Report;

/// Seed for every randomized input unless `--seed` overrides it.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Environment variable capping the truncation degree of any command.
pub const MAX_DEGREE_ENV: &str = "HERMITEX_MAX_DEGREE";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub params: Vec<(String, String)>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub quad_nodes: Option<usize>,
    pub max_degree: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(command: &str, tol: f64, seed: u64) -> Result<Self, CliError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive and finite, got {tol}")));
        }
        Ok(Self {
            command: command.to_string(),
            inputs: Vec::new(),
            params: Vec::new(),
            tol,
            seed,
            out: None,
            quad_nodes: None,
            max_degree: None,
        })
    }

    pub fn with_out(mut self, out: Option<PathBuf>) -> Self {
        self.out = out;
        self
    }

    pub fn with_quad_nodes(mut self, n: Option<usize>) -> Result<Self, CliError> {
        if n == Some(0) {
            return Err(CliError::Usage("--quad-nodes must be positive".into()));
        }
        self.quad_nodes = n;
        Ok(self)
    }

    pub fn with_max_degree(mut self, cap: Option<usize>) -> Self {
        self.max_degree = cap;
        self
    }

    pub fn input(&mut self, spec: &str) {
        self.inputs.push(spec.to_string());
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn quad_nodes_or(&self, default: usize) -> usize {
        self.quad_nodes.unwrap_or(default)
    }

    pub fn check_degree(&self, degree: usize) -> Result<(), CliError> {
        match self.max_degree {
            Some(cap) if degree > cap => Err(hermitex::Error::DegreeCap { degree, cap }.into()),
            _ => Ok(()),
        }
    }

    /// Writes the configuration into the `[inputs]` section. The output
    /// path is left out so reports compare equal across output locations.
    pub fn echo(&self, report: &mut Report) {
        report.input("command", &self.command);
        for (i, spec) in self.inputs.iter().enumerate() {
            report.input(&format!("input.{i}"), spec);
        }
        for (k, v) in &self.params {
            report.input(k, v);
        }
        report.input("tol", crate::report::num(self.tol));
        report.input("seed", self.seed);
        if let Some(n) = self.quad_nodes {
            report.input("quad_nodes", n);
        }
        if let Some(cap) = self.max_degree {
            report.input("max_degree", cap);
        }
    }
}

/// Reads [`MAX_DEGREE_ENV`]; unset or empty means no cap.
pub fn max_degree_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(MAX_DEGREE_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{MAX_DEGREE_ENV} must be a non-negative integer, got `{v}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{MAX_DEGREE_ENV}: {e}"))),
    }
}
