//! Suite descriptors and the benchmark runner.
//!
//! # Descriptor schema
//!
//! A suite is a JSON object:
//!
//! ```json
//! {
//!   "problem": "spca",
//!   "m": 50,
//!   "n_list": [100, 200, 300],
//!   "p_list": [5, 10, 15],
//!   "lambda_list": [0.01],
//!   "seed_list": [1],
//!   "solvers": ["proxssn", "proxgd"],
//!   "mode": "experiment",
//!   "tol": null,
//!   "max_iter": 10000,
//!   "reference": "proxgd",
//!   "obj_target_slack": 1e-6
//! }
//! ```
//!
//! * `problem` — one of `spca`, `npca`, `slr`, `bec`.
//! * `m` — sample count (rows of the data matrix); ignored by `bec`.
//! * `n_list`, `p_list` — variable dimension grid. `slr` and `bec` use
//!   `p = 1` regardless; for `bec` each `n` is the complex dimension `M`.
//! * `lambda_list` — sparsity weights, or interaction strengths for `bec`.
//! * `seed_list` — data seeds; the instance grid is the cartesian product
//!   `n × p × lambda × seed` in that nesting order.
//! * `solvers` — which solvers produce records.
//! * `mode` — step-size regime, `experiment` (spectral) or `theory`.
//! * `tol` — KKT stopping tolerance; `null` selects the default rule
//!   `1e-10 · n · p` (`1e-6` for `bec`).
//! * `max_iter` — outer iteration cap (default 10000).
//! * `reference` — solver that fixes the objective target: it runs first
//!   to the KKT tolerance, then every other solver additionally stops as
//!   soon as its objective falls below `reference objective +
//!   obj_target_slack`.
//!
//! Omitted optional fields take the defaults shown above. Replaying
//! `run_suite` on the same descriptor reproduces every record except
//! `wall_time_s` byte-for-byte.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use proxssn::problems::{ProblemDescriptor, ProblemKind};
use proxssn::solver::{run_proxgd, run_proxssn};
use proxssn::{SolverConfig, SolverReport, StepMode};

use crate::record::{BenchRecord, RecordStatus, SolverId};

/// Grid of instances plus the run protocol. See the module docs for the
/// JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteDescriptor {
    pub problem: ProblemKind,
    #[serde(default)]
    pub m: usize,
    pub n_list: Vec<usize>,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<usize>,
    pub lambda_list: Vec<f64>,
    pub seed_list: Vec<u64>,
    pub solvers: Vec<SolverId>,
    #[serde(default)]
    pub mode: StepMode,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_reference")]
    pub reference: SolverId,
    #[serde(default = "default_slack")]
    pub obj_target_slack: f64,
}

fn default_p_list() -> Vec<usize> {
    vec![1]
}

fn default_max_iter() -> usize {
    10_000
}

fn default_reference() -> SolverId {
    SolverId::Proxgd
}

fn default_slack() -> f64 {
    1e-6
}

/// Rejected descriptor contents.
#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("suite descriptor: {0}")]
    Invalid(String),
}

impl SuiteDescriptor {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let fail = |msg: &str| Err(SuiteError::Invalid(msg.into()));
        if self.n_list.is_empty() {
            return fail("n_list is empty");
        }
        if self.p_list.is_empty() {
            return fail("p_list is empty");
        }
        if self.lambda_list.is_empty() {
            return fail("lambda_list is empty");
        }
        if self.seed_list.is_empty() {
            return fail("seed_list is empty");
        }
        if self.solvers.is_empty() {
            return fail("solvers is empty");
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return fail("solvers contains duplicates");
        }
        if !(self.obj_target_slack.is_finite() && self.obj_target_slack >= 0.0) {
            return fail("obj_target_slack must be finite and nonnegative");
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return fail("tol must be finite and positive");
            }
        }
        if self.max_iter == 0 {
            return fail("max_iter must be positive");
        }
        if self.problem != ProblemKind::Bec && self.m == 0 {
            return fail("m must be positive for data-matrix problems");
        }
        for &n in &self.n_list {
            if n == 0 {
                return fail("n_list entries must be positive");
            }
        }
        for &p in &self.p_list {
            if p == 0 {
                return fail("p_list entries must be positive");
            }
        }
        Ok(())
    }

    /// Instance grid in deterministic nesting order.
    pub fn instances(&self) -> Vec<ProblemDescriptor> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            for &p in &self.p_list {
                for &lambda in &self.lambda_list {
                    for &seed in &self.seed_list {
                        let (p_eff, m_eff) = match self.problem {
                            ProblemKind::Slr | ProblemKind::Bec => (1, self.m),
                            _ => (p, self.m),
                        };
                        out.push(ProblemDescriptor {
                            kind: self.problem,
                            m: m_eff,
                            n,
                            p: p_eff,
                            lambda,
                            seed,
                            mode: self.mode,
                        });
                    }
                }
            }
        }
        // Degenerate grids can repeat instances (e.g. p_list [2,3] for slr
        // collapses to p = 1); keep the first occurrence of each.
        let mut seen = std::collections::BTreeSet::new();
        out.retain(|d| seen.insert(d.id()));
        out
    }

    /// Stopping tolerance for one instance under the default rule.
    pub fn tol_for(&self, desc: &ProblemDescriptor) -> f64 {
        self.tol.unwrap_or_else(|| match self.problem {
            ProblemKind::Bec => 1e-6,
            _ => {
                let (rows, cols) = desc.dims();
                1e-10 * (rows * cols) as f64
            }
        })
    }
}

fn dispatch(solver: SolverId, desc: &ProblemDescriptor, cfg: &SolverConfig) -> SolverReport {
    let (prob, x0) = desc.build();
    match solver {
        SolverId::Proxssn => run_proxssn(&prob, cfg, &x0),
        SolverId::Proxgd => run_proxgd(&prob, cfg, &x0),
    }
}

fn record_from(
    desc: &ProblemDescriptor,
    solver: SolverId,
    outcome: Option<(SolverReport, f64)>,
) -> BenchRecord {
    match outcome {
        Some((rep, wall)) => BenchRecord {
            problem_id: desc.id(),
            solver_id: solver,
            m: desc.m,
            n: desc.n,
            p: desc.p,
            lambda: desc.lambda,
            seed: desc.seed,
            wall_time_s: wall,
            obj: rep.obj,
            kkt_err: rep.kkt_err,
            iters: rep.iters,
            newton_accepted: rep.newton_accepted,
            status: rep.status.into(),
        },
        None => BenchRecord {
            problem_id: desc.id(),
            solver_id: solver,
            m: desc.m,
            n: desc.n,
            p: desc.p,
            lambda: desc.lambda,
            seed: desc.seed,
            wall_time_s: 0.0,
            obj: f64::NAN,
            kkt_err: f64::NAN,
            iters: 0,
            newton_accepted: 0,
            status: RecordStatus::Error,
        },
    }
}

/// Runs one solver on one instance, capturing panics as error records.
fn guarded_run(
    solver: SolverId,
    desc: &ProblemDescriptor,
    cfg: &SolverConfig,
) -> Option<(SolverReport, f64)> {
    let started = Instant::now();
    catch_unwind(AssertUnwindSafe(|| dispatch(solver, desc, cfg)))
        .ok()
        .map(|rep| (rep, started.elapsed().as_secs_f64()))
}

/// All records for one instance: the reference solver first (it fixes the
/// objective target), then the remaining solvers in descriptor order.
fn run_instance(suite: &SuiteDescriptor, desc: &ProblemDescriptor) -> Vec<BenchRecord> {
    let tol = suite.tol_for(desc);
    let base = SolverConfig::for_mode(suite.mode)
        .with_tol(tol)
        .with_max_iter(suite.max_iter);

    let ref_outcome = guarded_run(suite.reference, desc, &base);
    let target = ref_outcome
        .as_ref()
        .map(|(rep, _)| rep.obj + suite.obj_target_slack);

    let mut records = Vec::with_capacity(suite.solvers.len());
    for &solver in &suite.solvers {
        let outcome = if solver == suite.reference {
            ref_outcome.clone()
        } else {
            let mut cfg = base.clone();
            cfg.obj_target = target;
            guarded_run(solver, desc, &cfg)
        };
        records.push(record_from(desc, solver, outcome));
    }
    records
}

/// Runs the whole suite, up to `jobs` instances concurrently. Record order
/// is deterministic: instances in grid order, solvers in descriptor order.
/// Individual failures become `status = error` records; the suite itself
/// never aborts.
pub fn run_suite(suite: &SuiteDescriptor, jobs: usize) -> Result<Vec<BenchRecord>, SuiteError> {
    suite.validate()?;
    let instances = suite.instances();
    let jobs = jobs.max(1);

    let nested: Vec<Vec<BenchRecord>> = if jobs == 1 {
        instances.iter().map(|d| run_instance(suite, d)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SuiteError::Invalid(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            instances
                .par_iter()
                .map(|d| run_instance(suite, d))
                .collect()
        })
    };

    Ok(nested.into_iter().flatten().collect())
}
