use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Arrays whose lengths or shapes do not agree.
    #[error("shape error: {0}")]
    Shape(String),
    /// A linear solve or quadrature failed to deliver a usable answer.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The iteration produced non-finite values.
    #[error("divergence: {0}")]
    Divergence(String),
    /// Evaluation too close to a zero of the Weierstrass quartic.
    #[error("singularity: {0}")]
    Singularity(String),
    /// A straight integration path passes too close to a branch point.
    #[error("integration path error: {0}")]
    Path(String),
    /// Boundary parametrisation requested outside its valid branch.
    #[error("branch error: {0}")]
    Branch(String),
    /// Malformed input file.
    #[error("input error at line {line}: {msg}")]
    Input { line: usize, msg: String },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::Divergence(_) | Error::Singularity(_) | Error::Path(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
