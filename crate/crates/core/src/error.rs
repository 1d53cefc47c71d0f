use thiserror::Error;

use crate::model::Chart;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate frequencies: omega1={omega1}, omega2={omega2} (need both > 0 and distinct)")]
    DegenerateFrequencies { omega1: f64, omega2: f64 },

    #[error("chart mismatch: {left:?} vs {right:?}")]
    ChartMismatch { left: Chart, right: Chart },

    #[error("singular blend (c1={c1}, c2={c2}): relative determinant {det:e}")]
    SingularBlend { c1: f64, c2: f64, det: f64 },

    #[error("singular Hessian: relative determinant {det:e}")]
    SingularHessian { det: f64 },

    #[error("no constant Poisson structure pairs with this Hamiltonian: symmetric part norm {symmetric_norm:e}")]
    NotAntisymmetric { symmetric_norm: f64 },

    #[error("insufficient samples: {distinct} distinct q values where the interaction is active (need 3); solution dimension found {dimension}")]
    InsufficientSamples { distinct: usize, dimension: usize },

    #[error("complex branch: radicand {radicand} < 0")]
    ComplexBranch { radicand: f64 },

    #[error("degenerate two-dimensional model: {0}")]
    DegenerateModel(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("non-unique solution: manifold of dimension {dimension}")]
    NonUnique { dimension: usize },

    #[error("singular map: relative determinant {det:e}")]
    SingularMap { det: f64 },

    #[error("pulled-back Hamiltonian is not in span(H1, H2): relative residual {residual:e}")]
    NotInSpan { residual: f64 },

    #[error("singular coefficient: c1*omega_i^2 - c2 = 0 for i = {index}")]
    SingularCoefficient { index: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {steps} exhausted at t = {t}")]
    StepLimit { t: f64, steps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no threshold in [{lambda_min}, {lambda_max}]: every coupling stays bounded")]
    AllBounded { lambda_min: f64, lambda_max: f64 },

    #[error("no threshold in [{lambda_min}, {lambda_max}]: the smallest coupling already escapes")]
    AllUnbounded { lambda_min: f64, lambda_max: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
