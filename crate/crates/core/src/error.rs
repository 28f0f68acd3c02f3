use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resistance {name} must be positive and finite, got {value} Ω")]
    InvalidResistance { name: &'static str, value: f64 },

    #[error("resistors {low} and {high} of one party must differ, both are {value} Ω")]
    IndistinguishableResistors {
        low: &'static str,
        high: &'static str,
        value: f64,
    },

    #[error("variance {name} must be non-negative and finite, got {value} V²")]
    InvalidVariance { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("source sequences differ in length: {alice} vs {bob}")]
    LengthMismatch { alice: usize, bob: usize },

    #[error("source sequences are empty")]
    EmptyInput,

    #[error(
        "singular denominator while solving for {name}: {denominator} against term scale {scale}"
    )]
    SingularDenominator {
        name: &'static str,
        denominator: f64,
        scale: f64,
    },

    #[error("infeasible configuration: {name} {kind} ({value} V²)")]
    Infeasible {
        name: &'static str,
        kind: &'static str,
        value: f64,
    },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
}
