use thiserror::Error;

use crate::model::TaskId;

#[derive(Debug, Error)]
pub enum RosterError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("unknown task id {0}")]
    UnknownTask(TaskId),

    #[error("instance has no feasible assignment: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("oracle guardrail exceeded: {0}")]
    Guardrail(String),

    #[error("invalid colored graph: {0}")]
    InvalidGraph(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = RosterError> = std::result::Result<T, E>;

impl RosterError {
    /// Stable snake_case tag for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidInstance(_) => "invalid_instance",
            Self::InvalidPlan(_) => "invalid_plan",
            Self::UnknownTask(_) => "unknown_task",
            Self::Infeasible(_) => "infeasible",
            Self::Precondition(_) => "precondition",
            Self::Guardrail(_) => "guardrail",
            Self::InvalidGraph(_) => "invalid_graph",
            Self::Json(_) => "malformed_json",
            Self::Io(_) => "io",
        }
    }
}
