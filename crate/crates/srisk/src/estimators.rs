//! Plug-in estimators for VaR, CVaR, and spectral risk from i.i.d. samples.
//!
//! Everything here is built from one primitive: the empirical quantile
//! `V̂_β = X_(⌈nβ⌉)` (rank clamped to at least 1). The spectral estimator is a
//! trapezoidal Riemann sum of `φ(β)·V̂_β` over a uniform partition of `[0, 1]`;
//! the CVaR estimator comes in the same trapezoidal flavour (restricted to
//! `[α, 1]` and rescaled) plus the classic tail-average form, which is useful
//! as an independent cross-check because it never touches a quadrature grid.
//!
//! For unbounded laws the concentration analysis applies to samples truncated
//! at a threshold `B_n` that grows slowly with n; `truncate_samples` and the
//! `*_truncated` wrappers implement that preprocessing step.

use crate::dist::DistModel;
use crate::samples::{OrderedSamples, Partition, TruncationMode};
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Rank ⌈nβ⌉ clamped to `[1, n]`, with a snap guard for products like
/// 10·0.07 = 0.7000…01 that would otherwise ceil one rank too high.
fn quantile_rank(n: usize, beta: f64) -> usize {
    let t = n as f64 * beta;
    let nearest = t.round();
    let k = if (t - nearest).abs() <= 1e-9 * t.abs().max(1.0) {
        nearest
    } else {
        t.ceil()
    };
    (k as usize).clamp(1, n)
}

/// Empirical value-at-risk: the order statistic `X_(⌈nβ⌉)`.
///
/// `β = 0` is allowed and returns the sample minimum (the rank clamps to 1);
/// `β = 1` returns the maximum. This matches the convention under which the
/// trapezoid endpoints at 0 and 1 are well defined.
pub fn empirical_var(samples: &OrderedSamples, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("empirical_var needs β in [0, 1], got {beta}")));
    }
    Ok(samples.order_stat(quantile_rank(samples.n(), beta)))
}

/// Trapezoidal spectral-risk estimate with `m` subintervals:
/// `Σ_k [φ(β_{k−1})·V̂_{β_{k−1}} + φ(β_k)·V̂_{β_k}]·Δ/2` over the uniform
/// partition of `[0, 1]`.
pub fn srm_trapz(samples: &OrderedSamples, spectrum: &Spectrum, m: usize) -> Result<f64> {
    let grid = Partition::new(0.0, 1.0, m)?;
    weighted_quantile_trapz(samples, |beta| spectrum.eval(beta), &grid)
}

/// Trapezoidal sum of `w(β)·V̂_β` over `grid`, shared by the SRM and CVaR
/// estimators so that the two provably coincide when their grids do.
fn weighted_quantile_trapz(
    samples: &OrderedSamples,
    weight: impl Fn(f64) -> f64,
    grid: &Partition,
) -> Result<f64> {
    let n = samples.n();
    let delta = grid.delta();
    let mut acc = 0.0;
    for k in 0..=grid.m() {
        let beta = grid.point(k);
        let node = weight(beta) * samples.order_stat(quantile_rank(n, beta));
        let w = if k == 0 || k == grid.m() { delta / 2.0 } else { delta };
        acc += w * node;
    }
    Ok(acc)
}

/// Classic CVaR plug-in: `V̂_α + (1/(n(1−α)))·Σ_i (X_i − V̂_α)⁺`.
///
/// No quadrature grid is involved, which makes this the natural cross-check
/// for [`cvar_trapz`].
pub fn classic_cvar(samples: &OrderedSamples, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let var = empirical_var(samples, alpha)?;
    let n = samples.n() as f64;
    let excess: f64 = samples.values().iter().map(|&x| (x - var).max(0.0)).sum();
    Ok(var + excess / (n * (1.0 - alpha)))
}

/// Trapezoidal CVaR estimate: the quantile trapezoid over `[α, 1]` with `m`
/// subintervals, scaled by `1/(1−α)`.
pub fn cvar_trapz(samples: &OrderedSamples, alpha: f64, m: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let grid = Partition::new(alpha, 1.0, m)?;
    let raw = weighted_quantile_trapz(samples, |_| 1.0, &grid)?;
    Ok(raw / (1.0 - alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("CVaR level must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Sample-size-dependent truncation threshold `B_n` for unbounded laws:
/// `√(2σ²·ln n)` for the Gaussian family and `ln(n)/λ` for the exponential.
///
/// Requires `n ≥ 2` (at n = 1 both formulas collapse to 0 and the truncated
/// batch would be degenerate). Families with bounded support need no
/// truncation and are reported as unsupported.
pub fn truncation_threshold(dist: &DistModel, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("truncation threshold needs n ≥ 2 samples, got {n}")));
    }
    let ln_n = (n as f64).ln();
    match *dist {
        DistModel::Gaussian { sigma, .. } => Ok((2.0 * sigma * sigma * ln_n).sqrt()),
        DistModel::Exponential { rate } => Ok(ln_n / rate),
        DistModel::Uniform { .. } | DistModel::PointMass { .. } => Err(Error::Unsupported(
            format!("truncation threshold is defined for unbounded families, not {dist}"),
        )),
    }
}

/// Applies `mode` at threshold `b` to every sample and re-sorts.
///
/// Re-sorting is required: zeroing out an exceeding sample moves it below any
/// positive sample, so the truncated batch is generally out of order.
pub fn truncate_samples(
    samples: &OrderedSamples,
    b: f64,
    mode: TruncationMode,
) -> Result<OrderedSamples> {
    if !b.is_finite() {
        return Err(Error::Domain(format!("truncation threshold must be finite, got {b}")));
    }
    let truncated: Vec<f64> = samples.values().iter().map(|&x| mode.apply(x, b)).collect();
    OrderedSamples::from_unsorted(truncated)
}

/// SRM estimate on samples truncated at the family's threshold `B_n`.
pub fn srm_trapz_truncated(
    samples: &OrderedSamples,
    spectrum: &Spectrum,
    m: usize,
    dist: &DistModel,
    mode: TruncationMode,
) -> Result<f64> {
    let b = truncation_threshold(dist, samples.n())?;
    srm_trapz(&truncate_samples(samples, b, mode)?, spectrum, m)
}

/// CVaR estimate on samples truncated at the family's threshold `B_n`.
pub fn cvar_trapz_truncated(
    samples: &OrderedSamples,
    alpha: f64,
    m: usize,
    dist: &DistModel,
    mode: TruncationMode,
) -> Result<f64> {
    let b = truncation_threshold(dist, samples.n())?;
    cvar_trapz(&truncate_samples(samples, b, mode)?, alpha, m)
}
