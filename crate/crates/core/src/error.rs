use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building chains or running evolutions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Forming lab-frame amplitudes e^{h n} past this point loses or
    /// overflows doubles once squared; route observables through the
    /// gauge frame instead.
    #[error(
        "gauge exponent |h*n| = {exponent:.3} exceeds the cap {cap}; \
         compute observables in the gauge frame"
    )]
    ExponentOverflow { exponent: f64, cap: f64 },

    #[error("mode index {l} out of range 1..={max}")]
    ModeOutOfRange { l: usize, max: usize },

    #[error("closed form requires exact cancellation; mismatch delta = {delta}")]
    MismatchUnsupported { delta: f64 },

    #[error("adaptive integration failed at t = {t_reached}: {reason}")]
    IntegrationFailure {
        t_reached: f64,
        reason: &'static str,
    },

    #[error("state norm underflowed to zero at t = {time}; site distribution undefined")]
    ZeroNorm { time: f64 },
}
