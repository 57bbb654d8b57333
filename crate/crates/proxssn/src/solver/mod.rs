//! Outer solvers: the projected semismooth Newton method and the
//! proximal-gradient baseline it is benchmarked against, plus the
//! matrix-free Krylov solver both lean on for Newton systems.

pub mod gmres;
pub mod proxgd;
pub mod ssn;

use crate::config::SolverConfig;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::report::SolverReport;

pub use crate::residual::kkt_error;
pub use gmres::{gmres as solve_krylov, KrylovError, KrylovOutcome};
pub use proxgd::{
    bb_stepsize, nonmonotone_linesearch, run_proxgd, LineSearchOutcome, LineSearchState,
};
pub use ssn::{accept_newton, run_proxssn};

/// Which outer algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Projected semismooth Newton with prox-gradient fallback.
    ProxSsn,
    /// Proximal gradient with BB steps and nonmonotone line search.
    ProxGd,
}

impl SolverKind {
    /// Runs the selected solver.
    pub fn run(
        self,
        prob: &CompositeProblem,
        cfg: &SolverConfig,
        x0: &MatPoint,
    ) -> SolverReport {
        match self {
            SolverKind::ProxSsn => run_proxssn(prob, cfg, x0),
            SolverKind::ProxGd => run_proxgd(prob, cfg, x0),
        }
    }

    /// Stable identifier used in benchmark output.
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::ProxSsn => "proxssn",
            SolverKind::ProxGd => "proxgd",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "proxssn" | "ssn" | "newton" => Ok(SolverKind::ProxSsn),
            "proxgd" | "gd" | "bb" => Ok(SolverKind::ProxGd),
            other => Err(format!("unknown solver '{other}' (try proxssn or proxgd)")),
        }
    }
}
