use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not implemented: {0}")]
    NotImplemented(&'static str),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(&'static str),

    #[error("search failure: {0}")]
    SearchFailure(String),

    /// The bound estimate increased with SNR by more than the statistical slack.
    #[error(
        "non-monotone error curve: eps({lo_db} dB) = {lo_eps:e} but eps({hi_db} dB) = {hi_eps:e}"
    )]
    NonMonotone {
        lo_db: f64,
        lo_eps: f64,
        hi_db: f64,
        hi_eps: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
