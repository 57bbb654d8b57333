//! Solvers for composite problems `min f(x) + h(x)` where `f` is smooth and
//! `h` is a sparsity-promoting term restricted to an oblique manifold (unit
//! columns), a nonnegative oblique manifold, a sphere, or a minimax concave
//! penalty on all of `R^n`.
//!
//! The central object is the natural residual of the proximal fixed-point map,
//!
//! ```text
//!     F(x) = x - prox_{t h}(x - t grad f(x)),
//! ```
//!
//! whose zeros are the stationary points of the composite objective. Two
//! solvers drive `F` to zero:
//!
//! * [`solver::run_proxssn`]: a projected semismooth Newton method that solves
//!   a regularized linearization of `F` matrix-free, projects the trial point
//!   back onto the constraint set, and falls back to a proximal gradient step
//!   whenever the Newton trial is rejected;
//! * [`solver::run_proxgd`]: a proximal gradient baseline with alternating
//!   Barzilai-Borwein step sizes and a nonmonotone line search.
//!
//! Closed-form proximal maps and their generalized Jacobians live in [`prox`].
//! Benchmark problem builders (sparse PCA, nonnegative PCA, sparse least
//! squares via quadratic reparametrization, and a discretized ground-state
//! energy model) live in [`problems`]. Brute-force grid and finite-difference
//! oracles used by the test suite live in [`oracle`].

pub mod config;
pub mod nonsmooth;
pub mod oracle;
pub mod point;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod report;
pub mod residual;
pub mod smooth;
pub mod solver;

pub use config::{SolverConfig, StepMode};
pub use nonsmooth::NonsmoothFn;
pub use point::MatPoint;
pub use problem::CompositeProblem;
pub use report::{SolverReport, Status, StepKind, TraceRecord};
pub use smooth::SmoothFn;
