use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("initial and boundary data disagree at corner {corner}: mismatch {mismatch:e}")]
    CornerMismatch { corner: &'static str, mismatch: f64 },

    #[error("gram matrix is numerically degenerate at basis index {index}: d^2 = {pivot:e}")]
    Degenerate { index: usize, pivot: f64 },

    #[error("iteration diverged at basis index {index}: {detail}")]
    Divergence { index: usize, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
        if (0.0..=1.0).contains(&value) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value,
                lo: 0.0,
                hi: 1.0,
            })
        }
    }
}
