//! Flat result rows: one per (problem instance, solver) pair.

use serde::{Deserialize, Serialize};

/// Which solver produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    Proxssn,
    Proxgd,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Proxssn => "proxssn",
            SolverId::Proxgd => "proxgd",
        }
    }
}

impl std::fmt::Display for SolverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "proxssn" | "ssn" => Ok(SolverId::Proxssn),
            "proxgd" | "gd" => Ok(SolverId::Proxgd),
            other => Err(format!("unknown solver '{other}' (try proxssn or proxgd)")),
        }
    }
}

/// Outcome of one run, including harness-level failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    /// KKT error dropped below the tolerance.
    Converged,
    /// Objective reached the reference target first.
    ObjectiveTarget,
    /// Iteration cap reached without meeting either stop.
    MaxIter,
    /// The run panicked or could not be set up.
    Error,
}

impl RecordStatus {
    /// Whether the run counts as solving the instance.
    pub fn is_success(self) -> bool {
        matches!(self, RecordStatus::Converged | RecordStatus::ObjectiveTarget)
    }
}

impl From<proxssn::Status> for RecordStatus {
    fn from(s: proxssn::Status) -> Self {
        match s {
            proxssn::Status::Converged => RecordStatus::Converged,
            proxssn::Status::ObjectiveTarget => RecordStatus::ObjectiveTarget,
            proxssn::Status::MaxIter => RecordStatus::MaxIter,
        }
    }
}

/// One benchmark result row. Field order here is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem_id: String,
    pub solver_id: SolverId,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub lambda: f64,
    pub seed: u64,
    pub wall_time_s: f64,
    pub obj: f64,
    pub kkt_err: f64,
    pub iters: usize,
    pub newton_accepted: usize,
    pub status: RecordStatus,
}

impl BenchRecord {
    /// CSV header, kept in lockstep with the struct declaration order
    /// (a test asserts the two agree).
    pub const FIELDS: [&'static str; 13] = [
        "problem_id",
        "solver_id",
        "m",
        "n",
        "p",
        "lambda",
        "seed",
        "wall_time_s",
        "obj",
        "kkt_err",
        "iters",
        "newton_accepted",
        "status",
    ];

    /// Copy with the wall time zeroed, for replay comparisons.
    pub fn without_wall_time(&self) -> BenchRecord {
        BenchRecord {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }
}
