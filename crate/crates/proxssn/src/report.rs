//! Run summaries emitted by the solvers.

use crate::point::MatPoint;
use serde::{Deserialize, Serialize};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Relative KKT error dropped below the tolerance.
    Converged,
    /// Iteration cap reached first.
    MaxIter,
    /// Objective fell below the configured target.
    ObjectiveTarget,
}

/// Which update produced an iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Newton,
    ProxGrad,
}

/// One completed outer iteration.
///
/// `obj` is the objective after the step, `residual_norm` is `||F||` at the
/// point the step was computed from, and `rho` is the reference residual
/// after any update (0 for the gradient baseline, which has none).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub obj: f64,
    pub residual_norm: f64,
    pub step: StepKind,
    pub rho: f64,
}

/// Final state and per-iteration trace of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    #[serde(with = "matrix_repr")]
    pub final_x: MatPoint,
    pub obj: f64,
    pub kkt_err: f64,
    pub iters: usize,
    pub newton_accepted: usize,
    pub newton_rejected: usize,
    pub trace: Vec<TraceRecord>,
    pub wall_time_s: f64,
    pub status: Status,
    /// Prox step size the run used.
    pub t_used: f64,
    /// Gradient Lipschitz estimate carried by the problem.
    pub l_estimate: f64,
}

/// Column-major `{rows, cols, data}` encoding for matrices. `serde_json`
/// prints shortest round-trip decimals, so serialized reports reproduce the
/// exact floating-point state.
mod matrix_repr {
    use super::MatPoint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(x: &MatPoint, ser: S) -> Result<S::Ok, S::Error> {
        Repr {
            rows: x.nrows(),
            cols: x.ncols(),
            data: x.as_slice().to_vec(),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<MatPoint, D::Error> {
        let repr = Repr::deserialize(de)?;
        if repr.data.len() != repr.rows * repr.cols {
            return Err(serde::de::Error::custom(format!(
                "matrix payload holds {} entries, shape says {}x{}",
                repr.data.len(),
                repr.rows,
                repr.cols
            )));
        }
        Ok(MatPoint::from_column_slice(repr.rows, repr.cols, &repr.data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> SolverReport {
        SolverReport {
            final_x: MatPoint::from_column_slice(2, 1, &[0.1f64.sqrt(), (0.9f64).sqrt()]),
            obj: 1.0 / 3.0,
            kkt_err: 2.3e-11,
            iters: 2,
            newton_accepted: 1,
            newton_rejected: 0,
            trace: vec![
                TraceRecord {
                    iter: 0,
                    obj: 0.5,
                    residual_norm: 0.25,
                    step: StepKind::ProxGrad,
                    rho: 0.3,
                },
                TraceRecord {
                    iter: 1,
                    obj: 1.0 / 3.0,
                    residual_norm: 1e-7,
                    step: StepKind::Newton,
                    rho: 1e-8,
                },
            ],
            wall_time_s: 0.01,
            status: Status::Converged,
            t_used: 1.0,
            l_estimate: 4.0,
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let report = sample_report();
        let text = serde_json::to_string(&report).unwrap();
        let back: SolverReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
        // Serializing the deserialized copy reproduces the bytes.
        assert_eq!(text, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn matrix_shape_mismatch_is_rejected() {
        let bad = r#"{"rows":2,"cols":2,"data":[1.0,2.0,3.0]}"#;
        let wrapped = format!(
            "{{\"final_x\":{bad},\"obj\":0.0,\"kkt_err\":0.0,\"iters\":0,\"newton_accepted\":0,\"newton_rejected\":0,\"trace\":[],\"wall_time_s\":0.0,\"status\":\"Converged\",\"t_used\":1.0,\"l_estimate\":1.0}}"
        );
        assert!(serde_json::from_str::<SolverReport>(&wrapped).is_err());
    }
}
