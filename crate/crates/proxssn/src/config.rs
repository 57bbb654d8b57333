//! Solver parameter bundle and validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How the prox step size `t` is chosen when a problem is built.
///
/// `Theory` caps `t` at `min(gamma, 1) / L` so that every convergence
/// guarantee applies; `Experiment` uses the spectral step `1 / lambda_max`
/// of the data Gram matrix, which is far larger and works well in practice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    Theory,
    #[default]
    Experiment,
}

impl std::str::FromStr for StepMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "theory" => Ok(StepMode::Theory),
            "experiment" => Ok(StepMode::Experiment),
            other => Err(format!(
                "unknown step mode '{other}' (try theory or experiment)"
            )),
        }
    }
}

/// Parameters shared by the Newton solver and the proximal gradient baseline.
///
/// The defaults mirror the benchmark profile: `kappa = 1`, `nu = 0.9999`,
/// `eta = 1e-6`, `q = 20`. [`SolverConfig::theory`] switches to the
/// conservative profile with `q = 0.5`, the only regime covered by the
/// local convergence analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Scale of the Newton regularization `mu = kappa * ||F(x)||`.
    pub kappa: f64,
    /// Residual contraction factor for accepting a Newton trial point.
    pub nu: f64,
    /// Weight of the objective ascent slack in the acceptance test.
    pub eta: f64,
    /// Exponent of the ascent slack term `eta * rho^(1-q) * ||F(z)||^q`.
    pub q: f64,
    /// Lower bound for the initial reference residual.
    pub rho0: f64,
    /// Relative KKT stopping tolerance.
    pub tol: f64,
    /// Outer iteration cap.
    pub max_iter: usize,
    /// Line-search sufficient-progress weight.
    pub varrho: f64,
    /// Line-search backtracking factor.
    pub delta: f64,
    /// Nonmonotone reference averaging weight.
    pub varpi: f64,
    /// Relative tolerance cap for the inner Krylov solve.
    pub krylov_tol: f64,
    /// Iteration cap for the inner Krylov solve.
    pub krylov_maxit: usize,
    /// Provenance seed recorded with the run.
    pub seed: u64,
    /// Optional early stop once the objective drops to this value.
    pub obj_target: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::experiment()
    }
}

impl SolverConfig {
    /// Benchmark profile.
    pub fn experiment() -> Self {
        SolverConfig {
            kappa: 1.0,
            nu: 0.9999,
            eta: 1e-6,
            q: 20.0,
            rho0: 1.0,
            tol: 1e-8,
            max_iter: 10_000,
            varrho: 1e-4,
            delta: 0.5,
            varpi: 0.85,
            krylov_tol: 0.1,
            krylov_maxit: 100,
            seed: 0,
            obj_target: None,
        }
    }

    /// Conservative profile matching the local convergence analysis,
    /// which requires `q` strictly between 0 and 1.
    pub fn theory() -> Self {
        SolverConfig {
            q: 0.5,
            ..SolverConfig::experiment()
        }
    }

    /// Profile matching a step-size regime.
    pub fn for_mode(mode: StepMode) -> Self {
        match mode {
            StepMode::Theory => SolverConfig::theory(),
            StepMode::Experiment => SolverConfig::experiment(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_obj_target(mut self, target: f64) -> Self {
        self.obj_target = Some(target);
        self
    }

    /// Checks every parameter against its admissible range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn check(ok: bool, field: &'static str, got: f64, want: &'static str) -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { field, got, want })
            }
        }
        check(self.kappa > 0.0, "kappa", self.kappa, "> 0")?;
        check(self.nu > 0.0 && self.nu < 1.0, "nu", self.nu, "in (0, 1)")?;
        check(self.eta > 0.0, "eta", self.eta, "> 0")?;
        check(self.q > 0.0, "q", self.q, "> 0")?;
        check(self.rho0 > 0.0, "rho0", self.rho0, "> 0")?;
        check(self.tol > 0.0, "tol", self.tol, "> 0")?;
        check(self.max_iter >= 1, "max_iter", self.max_iter as f64, ">= 1")?;
        check(
            self.varrho > 0.0 && self.varrho <= 1.0,
            "varrho",
            self.varrho,
            "in (0, 1]",
        )?;
        check(
            self.delta > 0.0 && self.delta <= 1.0,
            "delta",
            self.delta,
            "in (0, 1]",
        )?;
        check(
            self.varpi > 0.0 && self.varpi <= 1.0,
            "varpi",
            self.varpi,
            "in (0, 1]",
        )?;
        check(
            self.krylov_tol > 0.0 && self.krylov_tol < 1.0,
            "krylov_tol",
            self.krylov_tol,
            "in (0, 1)",
        )?;
        check(
            self.krylov_maxit >= 1,
            "krylov_maxit",
            self.krylov_maxit as f64,
            ">= 1",
        )?;
        if let Some(target) = self.obj_target {
            check(target.is_finite(), "obj_target", target, "finite")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("{field} = {got} out of range, expected {want}")]
    OutOfRange {
        field: &'static str,
        got: f64,
        want: &'static str,
    },
}
