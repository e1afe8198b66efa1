//! Error taxonomy mapped onto process exit codes: 2 config, 3 solver
//! non-convergence, 4 refused problem (non-coercive regime or violated
//! friction-anisotropy condition), 1 anything else.

use coulomb2d::fem::data::FemError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("problem refused: {0}")]
    Refused(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Refused(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

/// Maps a solver error onto the exit taxonomy. Convergence failures keep
/// exit 3; the violated friction-anisotropy condition `f·|alpha| < 1` is a
/// refusal (exit 4); everything else points at the problem data.
pub fn from_fem(err: FemError) -> CliError {
    match err {
        FemError::FrictionConditionViolated { margin } => CliError::Refused(format!(
            "friction-anisotropy condition f*|alpha| < 1 violated: margin {margin}"
        )),
        FemError::InnerNotConverged { residual } => CliError::NotConverged(format!(
            "inner solver stalled at residual {residual:.3e}"
        )),
        FemError::NotConverged { residual_history } => CliError::NotConverged(format!(
            "fixed-point iteration stalled at residual {:.3e} after {} iterations",
            residual_history.last().copied().unwrap_or(f64::NAN),
            residual_history.len()
        )),
        FemError::StepFailed { step, source } => {
            let inner = from_fem(*source);
            match inner {
                CliError::Config(msg) => CliError::Config(format!("step {step}: {msg}")),
                CliError::NotConverged(msg) => {
                    CliError::NotConverged(format!("step {step}: {msg}"))
                }
                CliError::Refused(msg) => CliError::Refused(format!("step {step}: {msg}")),
                CliError::Internal(msg) => CliError::Internal(format!("step {step}: {msg}")),
            }
        }
        other => CliError::Config(format!("{other}")),
    }
}
