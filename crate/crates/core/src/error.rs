use thiserror::Error;

/// Errors raised by the geometry, measure and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("resolution {got} is below the minimum of {min}")]
    ResolutionTooSmall { got: usize, min: usize },

    #[error("support value {value} at index {index} is not positive")]
    NonPositiveSupport { index: usize, value: f64 },

    #[error("vector of norm {norm} is not a unit vector")]
    NotUnit { norm: f64 },

    #[error("unbounded intersection: the normals leave an angular gap of {gap} rad (>= pi)")]
    Unbounded { gap: f64 },

    #[error("empty interior: {0}")]
    EmptyInterior(String),

    #[error("quantile argument {0} is outside (0, 1)")]
    QuantileDomain(f64),

    #[error("convexity violated at node {node}: h'' + h = {value}")]
    ConvexityViolated { node: usize, value: f64 },

    #[error(
        "measure is concentrated on a closed hemisphere: min over e of sum m (e.v)_+ = {min_value} \
         <= {epsilon} at e = ({dir_x}, {dir_y}); the objective stays bounded while bodies \
         escape to infinity along e, so a minimizing sequence cannot be bounded and no \
         minimizer exists"
    )]
    HemisphereViolated {
        min_value: f64,
        epsilon: f64,
        dir_x: f64,
        dir_y: f64,
    },

    #[error("total mass {mass} is not below the admissible bound {bound}")]
    MassBoundViolated { mass: f64, bound: f64 },

    #[error("no constant solution: c0 = {c0} is not below the attainable maximum {max}")]
    NoConstantSolution { c0: f64, max: f64 },

    #[error("wrong branch: the constant solution r0 = {r0} has gaussian volume {volume} <= 1/2")]
    WrongBranch { r0: f64, volume: f64 },

    #[error("singular jacobian at row {row} (pivot {pivot}); try a smaller t-step")]
    SingularJacobian { row: usize, pivot: f64 },

    #[error("line search stalled: {0}")]
    LineSearchStalled(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("path left the certified region: {0}")]
    CertificateLost(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
