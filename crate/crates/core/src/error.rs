use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("undeclared extern `{0}`")]
    UndeclaredExtern(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("jet index out of range: {index} >= base dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("unsupported expression: {0}")]
    Unsupported(String),

    #[error("jet order overflow: {0} survives after expansion")]
    JetOrderOverflow(String),

    #[error("extern `{0}` has no declared derivative")]
    MissingDerivative(String),

    #[error("no computable antiderivative along x0: {0}")]
    MissingAntiderivative(String),

    #[error("no numeric value assigned to {0}")]
    MissingValue(String),

    #[error("extern `{0}` has no numeric definition")]
    MissingDefinition(String),

    #[error("invalid field system: {0}")]
    InvalidSystem(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("Euler-Lagrange derivative does not vanish identically (field {field}): {residual}")]
    NotNullLagrangian { field: usize, residual: String },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("f^mu condition violated: {0}")]
    FPotCondition(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("singular mass matrix at t = {0}")]
    SingularMassMatrix(f64),

    #[error("region outside sample domain: {0}")]
    RegionOutsideDomain(String),

    #[error("improved current absent: {0}")]
    MissingCurrent(String),

    #[error("{field}: {msg}")]
    Spec { field: String, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
