use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a model invariant.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Input outside the range where the model or a numerical method is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent configuration, e.g. charged defects without a defect-loss coefficient.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A numerical method failed to converge.
    #[error("numerical error in {method}: {detail}")]
    Numerical { method: &'static str, detail: String },

    /// Two algebraically equivalent evaluation routes disagree.
    #[error("internal consistency check failed for {quantity}: {first:e} vs {second:e} (relative {relative:e})")]
    Consistency {
        quantity: &'static str,
        first: f64,
        second: f64,
        relative: f64,
    },

    /// The amplifier is at or above parametric threshold; `pump_ratio` is |ξ|/(κ/2).
    #[error("at/above parametric threshold: |xi|/(kappa/2) = {pump_ratio:.6}")]
    Threshold { pump_ratio: f64 },

    /// The 3WM objective is identically zero over the search range.
    #[error("flat objective: |xi| vanishes over the whole search range")]
    FlatObjective,

    /// Error raised while evaluating one point of a sweep.
    #[error("at {variable} = {value:e}: {source}")]
    AtPoint {
        variable: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, variable: &'static str, value: f64) -> Self {
        Error::AtPoint {
            variable,
            value,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping sweep-point wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidParameter { .. } | Error::Configuration(_) | Error::Domain(_)
        )
    }
}

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
