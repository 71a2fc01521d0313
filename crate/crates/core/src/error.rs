use thiserror::Error;

/// Everything that can go wrong between a configuration file and a trajectory.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("{field}: {constraint} (got {value})")]
    Domain {
        field: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// The sampling grid cannot represent the requested pulse.
    #[error("grid too small: {invariant} (need {required:.6e}, have {actual:.6e})")]
    GridSizing {
        invariant: &'static str,
        required: f64,
        actual: f64,
    },

    /// The requested solver step cannot resolve the fastest dynamics.
    #[error("solver step {dt:.6e} ps too large; need dt <= {required:.6e} ps")]
    StepTooLarge { dt: f64, required: f64 },

    /// Malformed or inconsistent configuration.
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(field: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::Domain {
            field,
            constraint,
            value,
        }
    }

    /// True for refusals caused by the numerical setup (grid or step size).
    pub fn is_numerical_refusal(&self) -> bool {
        matches!(self, Error::GridSizing { .. } | Error::StepTooLarge { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
