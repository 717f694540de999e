//! Sample containers and quadrature grids shared by every estimator.
//!
//! Estimators in this crate are all order-statistic plug-ins: they look up
//! empirical quantiles by rank. Keeping samples in a container that is sorted
//! *by construction* ([`OrderedSamples`]) means the rank lookup is O(1) and no
//! estimator ever has to re-check ordering. [`Partition`] is the uniform grid
//! `a = β_0 < β_1 < … < β_m = b` used by the trapezoidal rules; it guarantees
//! the endpoints are hit exactly so that grid-restricted identities (e.g. the
//! CVaR/SRM equivalence on a shared grid) hold without float slop.

use crate::{Error, Result};

/// A non-empty batch of real-valued samples stored in ascending order.
///
/// NaN is rejected at construction (a NaN poisons every order statistic), and
/// infinities are rejected too because the estimators integrate quantile
/// values — a single ±∞ would make every downstream trapezoid sum undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSamples {
    values: Vec<f64>,
}

impl OrderedSamples {
    /// Wraps a batch that is already in ascending order.
    ///
    /// Verifies the ordering rather than trusting the caller; the check is a
    /// single pass and the error beats silently wrong quantiles.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        Self::check_finite(&values)?;
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain(
                "from_sorted requires ascending values; use from_unsorted to sort".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Sorts a raw batch and wraps it.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        Self::check_finite(&values)?;
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Parses a plain-text batch: one real per line, `#` comments and blank
    /// lines ignored. This is the CLI's sample-file format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let x: f64 = line.parse().map_err(|_| {
                Error::Config(format!("sample file line {}: not a real number: {line:?}", idx + 1))
            })?;
            values.push(x);
        }
        Self::from_unsorted(values).map_err(|e| match e {
            Error::Domain(msg) => Error::Config(format!("sample file: {msg}")),
            other => other,
        })
    }

    fn check_finite(values: &[f64]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::Domain("sample batch must be non-empty".into()));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("sample batch contains non-finite value {bad}")));
        }
        Ok(())
    }

    /// Number of samples (≥ 1).
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// The samples in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest sample, i.e. the first order statistic.
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Largest sample, i.e. the n-th order statistic.
    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The k-th order statistic with the conventional 1-based index.
    ///
    /// Panics on k = 0 or k > n; callers clamp ranks before lookup.
    pub fn order_stat(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// Uniform grid over `[lo, hi]` with `m` subintervals.
///
/// `point(k)` returns the endpoints *exactly* at `k = 0` and `k = m` — the
/// interior points are `lo + k·Δ` — so trapezoid sums over `[α, 1]` really do
/// evaluate the integrand at 1 and never trip quantile-domain checks by
/// landing at `1 ± ulp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    lo: f64,
    hi: f64,
    m: usize,
}

impl Partition {
    /// Grid on `[lo, hi]` with `m ≥ 1` subintervals; requires `lo < hi` and
    /// finite endpoints.
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Domain(format!("partition endpoints must be finite, got [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(Error::Domain(format!("partition needs lo < hi, got [{lo}, {hi}]")));
        }
        if m == 0 {
            return Err(Error::Domain("partition needs at least one subinterval".into()));
        }
        Ok(Self { lo, hi, m })
    }

    /// Grid node β_k for `k ∈ {0, …, m}`, endpoint-exact.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k <= self.m);
        if k == 0 {
            self.lo
        } else if k == self.m {
            self.hi
        } else {
            // Computing the node as lo + k·(span/m) keeps the grid monotone;
            // the k/m form can be non-monotone when span/m is inexact.
            self.lo + (k as f64) * self.delta()
        }
    }

    /// Subinterval width Δ = (hi − lo)/m.
    pub fn delta(&self) -> f64 {
        (self.hi - self.lo) / self.m as f64
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Lower endpoint.
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Upper endpoint.
    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// How samples above the truncation threshold B are treated.
///
/// `ZeroOut` is the form the analysis is written for (x·1{x ≤ B}: an
/// exceeding sample collapses to zero, i.e. the truncated random variable).
/// `Clip` (min(x, B)) is the common practical variant; it keeps the sample
/// mass at the threshold instead of teleporting it to zero and is usually the
/// better estimator, so both are offered and callers choose explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationMode {
    /// Replace x > B by 0 (multiply by the indicator 1{x ≤ B}).
    ZeroOut,
    /// Replace x > B by B (clamp from above).
    Clip,
}

impl TruncationMode {
    /// Applies the mode to one sample given threshold `b`.
    pub fn apply(self, x: f64, b: f64) -> f64 {
        match self {
            TruncationMode::ZeroOut => {
                if x > b {
                    0.0
                } else {
                    x
                }
            }
            TruncationMode::Clip => x.min(b),
        }
    }
}
