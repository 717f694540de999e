//! Spectral risk measure (SRM) estimation and verification toolkit.
//!
//! A spectral risk measure weights the quantiles of a loss distribution by a
//! risk-aversion function φ:
//!
//! ```text
//! S(X) = ∫₀¹ φ(β) V_β(X) dβ,      V_β(X) = inf { c : P(X ≤ c) ≥ β }
//! ```
//!
//! CVaR is the special case φ(β) = 1{β > α}/(1−α). This crate provides:
//!
//! - parametric distribution models with exact quantiles and high-precision
//!   analytic SRM/CVaR oracles ([`dist`]);
//! - risk-aversion spectra and the sample-based estimators: empirical VaR,
//!   trapezoidal SRM, classic and trapezoidal CVaR, plus tail-truncated
//!   variants for unbounded laws ([`spectrum`], [`samples`], [`estimators`]);
//! - every discretization / concentration bound as an evaluable formula,
//!   together with computation of the constants they require ([`bounds`]);
//! - successive-rejects best-arm identification driven by any risk
//!   functional ([`bandit`]);
//! - a seeded, parallel Monte Carlo experiment harness with CSV/JSONL
//!   emission ([`exec`], [`harness`], [`report`]).
//!
//! All randomness flows from a single 64-bit base seed through splittable
//! child streams ([`seeds`]); identical inputs produce byte-identical
//! outputs regardless of thread count.

pub mod bandit;
pub mod bounds;
pub mod dist;
pub mod estimators;
pub mod exec;
pub mod harness;
pub mod quad;
pub mod report;
pub mod samples;
pub mod seeds;
pub mod spectrum;

pub use bandit::{phase_lengths, successive_rejects, ArmEnv, RiskFunctional, SrTrace};
pub use bounds::{
    compute_constants, cvar_bound, srm_bound_bounded, srm_bound_exponential, srm_bound_gaussian,
    trapz_error_first, trapz_error_second, var_bound, BoundConstants, BoundedKind, CvarCase,
    TailBoundReport,
};
pub use dist::{DistModel, QuantileDerivatives};
pub use estimators::{
    classic_cvar, cvar_trapz, cvar_trapz_truncated, empirical_var, srm_trapz, srm_trapz_truncated,
    truncate_samples, truncation_threshold,
};
pub use samples::{OrderedSamples, Partition, TruncationMode};
pub use spectrum::Spectrum;

/// Unified error type for the whole crate.
///
/// The CLI maps `Numerical` to exit code 3 and everything else to exit
/// code 2 (configuration / input errors).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the operation's domain (β ∉ (0,1), n = 0, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is undefined for this input (e.g. the density of a
    /// point mass).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A bound or constant requires a spectrum derivative bound (C2/C3)
    /// that the spectrum does not declare.
    #[error("missing constant: {0}")]
    MissingConstant(String),

    /// An iterative numeric routine failed to reach the requested accuracy.
    /// `achieved` is the error estimate at the iteration cap.
    #[error("numerical failure: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Numerical {
        what: String,
        achieved: f64,
        requested: f64,
    },

    /// Malformed configuration: dist/spectrum specs, CLI values, env files.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading inputs or writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
