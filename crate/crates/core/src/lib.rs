//! Generalized Kirchhoff-law-Johnson-noise (KLJN) key exchange.
//!
//! Alice and Bob each own two resistors (low and high) with a noise voltage
//! generator in series. Per bit, each side connects one of its resistors to a
//! shared wire. An eavesdropper sees only the wire voltage and current. With
//! four arbitrary resistors the exchange stays secure as long as the generator
//! variances are tuned so that the LH and HL states have the same current
//! variance, voltage variance and mean power flow.
//!
//! The crate is split along those lines:
//!
//! * [`circuit`]: resistor/variance data model, instantaneous wire signals and
//!   their exact second moments.
//! * [`solver`]: closed-form generator variances for a resistor quad, plus the
//!   residual check of the three security conditions.
//! * [`noise`]: reproducible Gaussian streams keyed by `(master_seed, stream_id)`
//!   and Johnson-noise helpers.
//! * [`simulation`]: Monte-Carlo exchange, eavesdropper statistics, median
//!   threshold bit-error rates and histogram/scatter data.

pub mod circuit;
pub mod error;
pub mod noise;
pub mod simulation;
pub mod solver;

pub use circuit::{
    line_signals, theoretical_moments, Generator, LineSignals, LineState, Moments, NoiseVariances,
    ResistorQuad,
};
pub use error::{Error, Result};
pub use noise::{
    effective_temperature, gaussian_block, johnson_variance, JohnsonParams, StreamSeed,
    BOLTZMANN_CONSTANT, GENERATOR_ALGORITHM,
};
pub use simulation::{
    ber_report, estimate_ber, histogram, run_exchange, scatter_trace, simulate_bit, BerEntry,
    BitStats, Histogram, Indicator, SimConfig, StatePolicy,
};
pub use solver::{check_security, is_feasible, solve_variances, Feasibility, SecurityResiduals};
