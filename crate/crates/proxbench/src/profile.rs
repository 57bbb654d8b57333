//! Performance profiles: cumulative distributions of log-scaled
//! performance ratios across a problem set.
//!
//! For each problem `i` and solver `s`, the ratio `r_{i,s}` divides the
//! solver's metric value by the best value any solver achieved on that
//! problem. The curve `pi_s(tau)` is the fraction of problems where
//! `log2(r_{i,s}) <= tau`: the value at `tau = 0` is the fraction of
//! problems the solver wins outright, and the curve climbs toward 1 as
//! `tau` admits larger slowdown factors. Runs that did not succeed get an
//! infinite ratio, so a solver with failures tops out below 1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::record::BenchRecord;

/// How a run is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMetric {
    /// Wall-clock seconds (nondeterministic; for reporting only).
    Time,
    /// Objective gap to the best solver on the problem, floored at 1e-16
    /// so ties do not divide by zero.
    ObjGap,
}

impl std::str::FromStr for ProfileMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "time" => Ok(ProfileMetric::Time),
            "obj_gap" | "obj-gap" | "objgap" => Ok(ProfileMetric::ObjGap),
            other => Err(format!("unknown metric '{other}' (try time or obj_gap)")),
        }
    }
}

/// One sample of a profile curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub tau: f64,
    pub pi: f64,
}

/// Cumulative ratio distribution for one solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver_id: String,
    pub points: Vec<ProfilePoint>,
}

/// Why a profile could not be computed.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("performance profile needs at least 2 solvers and 1 problem (got {solvers} solver(s), {problems} problem(s))")]
    InsufficientData { solvers: usize, problems: usize },
}

/// Number of uniform `tau` samples per curve.
pub const PROFILE_SAMPLES: usize = 200;

const GAP_FLOOR: f64 = 1e-16;

/// Computes one curve per solver from flat benchmark records.
///
/// Only successful runs (converged or objective-target) count; a solver
/// that failed or is missing on a problem never satisfies the threshold
/// there. Curves are sampled at 200 uniform points over `[0, tau_max]`,
/// where `tau_max` is the largest finite log2 ratio (at least 1), and are
/// returned sorted by solver id. The result depends only on the record
/// multiset, not its order.
pub fn performance_profile(
    records: &[BenchRecord],
    metric: ProfileMetric,
) -> Result<Vec<ProfileCurve>, ProfileError> {
    let solvers: BTreeSet<&str> = records.iter().map(|r| r.solver_id.as_str()).collect();
    let mut problems: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        problems.entry(r.problem_id.as_str()).or_default().push(r);
    }
    if solvers.len() < 2 || problems.is_empty() {
        return Err(ProfileError::InsufficientData {
            solvers: solvers.len(),
            problems: problems.len(),
        });
    }
    let n_problems = problems.len() as f64;

    // log2 ratios per solver across problems; failures are implicit
    // (a missing entry never passes a threshold).
    let mut log_ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for rows in problems.values() {
        // Metric value per successful solver; duplicates keep the best.
        let mut values: BTreeMap<&str, f64> = BTreeMap::new();
        for r in rows {
            if !r.status.is_success() {
                continue;
            }
            let v = match metric {
                ProfileMetric::Time => r.wall_time_s,
                ProfileMetric::ObjGap => r.obj,
            };
            if !v.is_finite() {
                continue;
            }
            values
                .entry(r.solver_id.as_str())
                .and_modify(|best| *best = best.min(v))
                .or_insert(v);
        }
        let Some(best_raw) = values.values().copied().reduce(f64::min) else {
            continue; // every solver failed here; the problem still counts
        };
        for (solver, v) in values {
            let ratio = match metric {
                ProfileMetric::Time => v / best_raw.max(GAP_FLOOR),
                ProfileMetric::ObjGap => (v - best_raw).max(GAP_FLOOR) / GAP_FLOOR,
            };
            log_ratios.entry(solver).or_default().push(ratio.log2());
        }
    }

    let tau_max = log_ratios
        .values()
        .flatten()
        .copied()
        .fold(1.0_f64, f64::max);

    let mut curves = Vec::with_capacity(solvers.len());
    for solver in solvers {
        let logs = log_ratios.get(solver).map(Vec::as_slice).unwrap_or(&[]);
        let points = (0..PROFILE_SAMPLES)
            .map(|j| {
                let tau = tau_max * j as f64 / (PROFILE_SAMPLES - 1) as f64;
                let hits = logs.iter().filter(|&&lr| lr <= tau).count();
                ProfilePoint {
                    tau,
                    pi: hits as f64 / n_problems,
                }
            })
            .collect();
        curves.push(ProfileCurve {
            solver_id: solver.to_string(),
            points,
        });
    }
    Ok(curves)
}
