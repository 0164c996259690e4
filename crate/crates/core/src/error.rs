use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the quantity being computed.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or index dimensions do not fit together.
    #[error("shape error: {0}")]
    Shape(String),

    /// The total variance cannot accommodate the thermal noise floor.
    #[error("infeasible modulation: alice variance {alice} < thermal variance {thermal}")]
    InfeasibleModulation { alice: f64, thermal: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// A closed-form expression produced a value that cannot come from a physical state.
    #[error("numeric consistency error: {0}")]
    NumericConsistency(String),

    /// No point in the search bracket meets the requirement.
    #[error("not achievable: {0}")]
    NoneAchievable(String),

    /// The requirement is still met at the far end of the search bracket.
    #[error("root lies outside the search bracket: {0}")]
    BracketExceeded(String),

    #[error("absorption table row {row}: {message}")]
    Format { row: usize, message: String },

    #[error(
        "frequency {frequency_ghz} GHz outside absorption table range [{min_ghz}, {max_ghz}] GHz"
    )]
    OutOfRange {
        frequency_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_transmissivity(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(domain(format!("transmissivity {t} outside [0, 1]")))
    }
}
