use thiserror::Error;

pub type Result<T, E = ShellError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ShellError {
    /// A 4x4 matrix handed to `vee` is not an element of se(3).
    #[error("matrix is not in se(3): {0}")]
    NotInAlgebra(String),

    /// Logarithm requested too close to a rotation by pi.
    #[error("rotation angle {angle} is outside the logarithm domain (must be < pi - 1e-6)")]
    LogDomain { angle: f64 },

    #[error("degenerate reference configuration: {0}")]
    DegenerateReference(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("configuration error at `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    /// The tangent system could not be solved; usually a bifurcation point.
    #[error("singular tangent system (condition estimate {condition:.3e}): {message}")]
    Singular { condition: f64, message: String },

    #[error("no convergence in load step {step} after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence {
        step: usize,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ShellError {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        ShellError::Config {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }
}
