use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A value broke a structural invariant (row sums, ranges, contiguity).
    #[error("validation error{}: {message}", fmt_context(.context))]
    Validation { context: String, message: String },

    /// `λ_i = 0` must coincide with a zero influence row.
    #[error("zero-row pairing violated at t={time}, agent {agent}: {detail}")]
    ZeroRowMismatch {
        time: usize,
        agent: usize,
        detail: String,
    },

    /// The susceptibility matrix vanished identically.
    #[error("susceptibility matrix is identically zero at t={time}")]
    VanishingSusceptibility { time: usize },

    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn fmt_context(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" in {context}")
    }
}

impl Error {
    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation {
            context: String::new(),
            message: message.into(),
        }
    }

    /// Prefixes the error with a location such as `schedule.layers[3]`.
    pub fn with_context(self, ctx: impl AsRef<str>) -> Self {
        let ctx = ctx.as_ref();
        match self {
            Error::Validation { context, message } => Error::Validation {
                context: if context.is_empty() {
                    ctx.to_string()
                } else {
                    format!("{ctx}.{context}")
                },
                message,
            },
            Error::Dimension(m) => Error::Dimension(format!("{ctx}: {m}")),
            Error::ZeroRowMismatch {
                time,
                agent,
                detail,
            } => Error::ZeroRowMismatch {
                time,
                agent,
                detail: format!("{ctx}: {detail}"),
            },
            other => other,
        }
    }

    /// Stamps a time step onto errors that carry one.
    pub fn at_time(self, t: usize) -> Self {
        match self {
            Error::ZeroRowMismatch { agent, detail, .. } => Error::ZeroRowMismatch {
                time: t,
                agent,
                detail,
            },
            Error::VanishingSusceptibility { .. } => Error::VanishingSusceptibility { time: t },
            Error::Validation { context, message } => Error::Validation {
                context,
                message: format!("{message} (t={t})"),
            },
            other => other,
        }
    }

    /// Whether this error comes from invalid input rather than an
    /// unmet certificate premise.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::CertificateUnavailable(_))
    }
}
