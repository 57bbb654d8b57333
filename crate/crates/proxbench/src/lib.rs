//! Benchmark harness for the composite-optimization solvers in `proxssn`:
//! suite execution over instance grids, Dolan-Moré performance profiles,
//! and deterministic CSV/JSON emission.
//!
//! The pieces compose in a pipeline:
//!
//! 1. [`suite::SuiteDescriptor`] — a JSON-serializable grid of problem
//!    instances plus the run protocol (solvers, tolerances, reference
//!    solver for the objective-target rule);
//! 2. [`suite::run_suite`] — executes the grid, one
//!    [`record::BenchRecord`] per (instance, solver) pair;
//! 3. [`profile::performance_profile`] — turns records into cumulative
//!    ratio curves;
//! 4. [`emit`] — reads and writes records and curves as CSV or JSON.
//!
//! The `proxbench` binary exposes the same pipeline as `solve`, `bench`,
//! and `profile` subcommands.

pub mod emit;
pub mod profile;
pub mod record;
pub mod suite;

pub use emit::{read_records_file, write_curves_file, write_records_file, Format};
pub use profile::{performance_profile, ProfileCurve, ProfileMetric, ProfilePoint};
pub use record::{BenchRecord, RecordStatus, SolverId};
pub use suite::{run_suite, SuiteDescriptor};
