use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("component {component}: missing field `{field}`")]
    MissingField { component: String, field: String },

    #[error("{what}: invalid value {value} ({reason})")]
    InvalidValue {
        what: String,
        value: f64,
        reason: &'static str,
    },

    #[error("instance has no component types")]
    EmptyCatalog,

    #[error("component {component}: no knapsack row bounds it and no finite analytic copy bound exists")]
    UnboundedComponent { component: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed instance document: {0}")]
    Document(String),

    #[error("state space of {count} states exceeds the ceiling of {ceiling} (bounds {bounds:?})")]
    StateSpaceTooLarge {
        count: u128,
        ceiling: usize,
        bounds: Vec<u32>,
    },

    #[error("design space of {count} designs exceeds the ceiling of {ceiling}")]
    DesignSpaceTooLarge { count: u128, ceiling: usize },

    #[error("action {action:?} is infeasible for state {state}")]
    InfeasibleAction { state: String, action: Vec<u32> },

    #[error("design {design:?} does not match the instance ({reason})")]
    BadDesign { design: Vec<u32>, reason: String },

    #[error("parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no design satisfies the log-failure target {epsilon}")]
    Infeasible { epsilon: f64 },

    #[error("linear system is singular ({0})")]
    Singular(String),

    #[error("policy does not fit the model: {0}")]
    BadPolicy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
