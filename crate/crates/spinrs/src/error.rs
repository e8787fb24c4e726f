use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A coth pole: alpha(q) = q_i - q_j hit {0} + 2*pi*i*Z for a root in
    /// the span of the chosen simple subset.
    #[error("singularity at root ({i},{j}): alpha(q) within wall tolerance of a coth pole")]
    Singularity { i: usize, j: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("branch continuity lost at step {step}: {detail}")]
    Continuity { step: usize, detail: String },

    #[error("zero diagonal entry {index} in logarithm path")]
    ZeroDiagonal { index: usize },

    #[error("eigenvalue collision (relative gap below tolerance) at t = {t}")]
    Breakdown { t: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("groupoid factors not composable: {0}")]
    Composability(String),

    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    #[error("step limit exceeded after {0} steps")]
    StepLimit(usize),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
