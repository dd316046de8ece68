//! Error taxonomy shared across the crate. The CLI maps variants onto its
//! exit codes, so keep the grouping stable: Config/Geometry/Parse are caller
//! mistakes, SupportViolation is a broken operator hypothesis, NonConvergence
//! is a numerical quality failure.

#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("config: {0}")]
    Config(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("i/o: {0}")]
    Io(String),
}
