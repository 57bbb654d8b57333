//! Benchmark problem families and the data generation behind them.
//!
//! Each submodule builds a [`CompositeProblem`](crate::problem::CompositeProblem)
//! from a handful of dimensions and a seed:
//!
//! * [`spca`] — sparse PCA over the oblique manifold, and its nonnegative
//!   variant over the nonnegative orthant slice of the manifold;
//! * [`slr`] — sparse least-squares regression over the simplex via the
//!   squared-variable parameterization, an L1-plus-oblique composite;
//! * [`bec`] — a discretized ground-state energy model with a unit-sphere
//!   constraint, stacked into real coordinates;
//! * [`data`] — deterministic Gaussian test matrices and spectral scaling
//!   shared by the families above;
//! * [`rng`] — the splitmix-based generator that keeps every problem
//!   instance reproducible from a single `u64` seed.
//!
//! [`ProblemDescriptor`] captures everything needed to rebuild an instance
//! — kind, dimensions, parameters, seed — and serializes to JSON so
//! benchmark runs are replayable from the descriptor alone.

pub mod bec;
pub mod data;
pub mod rng;
pub mod slr;
pub mod spca;

use serde::{Deserialize, Serialize};

use crate::config::StepMode;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;

/// The four benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Spca,
    Npca,
    Slr,
    Bec,
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spca" => Ok(ProblemKind::Spca),
            "npca" => Ok(ProblemKind::Npca),
            "slr" => Ok(ProblemKind::Slr),
            "bec" => Ok(ProblemKind::Bec),
            other => Err(format!(
                "unknown problem '{other}' (try spca, npca, slr, or bec)"
            )),
        }
    }
}

/// A replayable recipe for one problem instance.
///
/// Field use per kind: `spca`/`npca` read `m, n, p`; `slr` reads `m, n`
/// (`p` is forced to 1); `bec` reads `n` as the complex dimension `M` and
/// carries the interaction strength in `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescriptor {
    pub kind: ProblemKind,
    #[serde(default)]
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    /// Sparsity weight, or the interaction strength for `bec`.
    #[serde(default)]
    pub lambda: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: StepMode,
}

fn default_p() -> usize {
    1
}

impl ProblemDescriptor {
    /// Builds the instance and its canonical starting point.
    pub fn build(&self) -> (CompositeProblem, MatPoint) {
        match self.kind {
            ProblemKind::Spca => {
                spca::spca_problem(self.m, self.n, self.p, self.lambda, self.seed, self.mode)
            }
            ProblemKind::Npca => spca::npca_problem(self.m, self.n, self.p, self.seed, self.mode),
            ProblemKind::Slr => slr::slr_problem(self.m, self.n, self.lambda, self.seed, self.mode),
            ProblemKind::Bec => bec::bec_problem(self.n, self.lambda, self.seed, self.mode),
        }
    }

    /// Stable identifier for benchmark records.
    pub fn id(&self) -> String {
        let tag = match self.kind {
            ProblemKind::Spca => "spca",
            ProblemKind::Npca => "npca",
            ProblemKind::Slr => "slr",
            ProblemKind::Bec => "bec",
        };
        format!(
            "{tag}-m{}-n{}-p{}-l{}-s{}",
            self.m, self.n, self.p, self.lambda, self.seed
        )
    }

    /// Effective problem dimensions `(rows, cols)` of the variable.
    pub fn dims(&self) -> (usize, usize) {
        match self.kind {
            ProblemKind::Spca | ProblemKind::Npca => (self.n, self.p),
            ProblemKind::Slr => (self.n, 1),
            ProblemKind::Bec => (2 * self.n, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trips_through_json() {
        let desc = ProblemDescriptor {
            kind: ProblemKind::Spca,
            m: 50,
            n: 100,
            p: 5,
            lambda: 0.01,
            seed: 7,
            mode: StepMode::Experiment,
        };
        let text = serde_json::to_string(&desc).unwrap();
        let back: ProblemDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(desc, back);
    }

    #[test]
    fn descriptor_defaults_fill_in() {
        let back: ProblemDescriptor =
            serde_json::from_str(r#"{"kind":"bec","n":8,"lambda":500.0,"seed":3}"#).unwrap();
        assert_eq!(back.kind, ProblemKind::Bec);
        assert_eq!(back.p, 1);
        assert_eq!(back.dims(), (16, 1));
    }

    #[test]
    fn build_dispatches_to_every_family() {
        let cases = [
            ProblemDescriptor {
                kind: ProblemKind::Spca,
                m: 10,
                n: 8,
                p: 2,
                lambda: 0.05,
                seed: 1,
                mode: StepMode::Experiment,
            },
            ProblemDescriptor {
                kind: ProblemKind::Npca,
                m: 10,
                n: 8,
                p: 2,
                lambda: 0.0,
                seed: 1,
                mode: StepMode::Experiment,
            },
            ProblemDescriptor {
                kind: ProblemKind::Slr,
                m: 6,
                n: 10,
                p: 1,
                lambda: 0.01,
                seed: 1,
                mode: StepMode::Experiment,
            },
            ProblemDescriptor {
                kind: ProblemKind::Bec,
                m: 0,
                n: 8,
                p: 1,
                lambda: 500.0,
                seed: 1,
                mode: StepMode::Experiment,
            },
        ];
        for desc in cases {
            let (prob, x0) = desc.build();
            assert_eq!(prob.dims, desc.dims());
            assert_eq!((x0.nrows(), x0.ncols()), desc.dims());
            assert!(prob.h.value(&x0).is_finite(), "start outside the domain");
        }
    }
}
