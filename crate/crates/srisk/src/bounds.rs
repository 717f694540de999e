//! Finite-sample error bounds for the trapezoidal risk estimators.
//!
//! Two error sources are bounded separately and then combined by the
//! concentration results:
//!
//! * **Discretization** — replacing `∫ φ V` by an m-subinterval trapezoid
//!   costs at most `K₁(b−a)²/(4m)` when the integrand has a bounded first
//!   derivative, and `K₂(b−a)³/(12m²)` with a bounded second derivative
//!   ([`trapz_error_first`], [`trapz_error_second`]).
//! * **Sampling** — each empirical quantile concentrates around the true one
//!   at rate `exp(−2n·c̄·ε²)` ([`var_bound`]); a union bound over the grid
//!   yields tail bounds for the full estimator, in bounded-support form
//!   ([`srm_bound_bounded`]) and in truncated Gaussian/exponential forms
//!   ([`srm_bound_gaussian`], [`srm_bound_exponential`]), plus the CVaR
//!   specializations ([`cvar_bound`]).
//!
//! The distribution-dependent constants (δ₁ = sup 1/f, δ₂ = sup |f′|/f³, the
//! envelope products K₁/K₂, and the exponent constant c) are produced by
//! [`compute_constants`], which scans a dense quantile grid rather than
//! attempting symbolic extrema; the grid surrogate is documented on that
//! function and the `c` field can be overridden when a sharper constant is
//! known.

use crate::dist::DistModel;
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Number of quantile-grid points scanned by [`compute_constants`].
const CONSTANTS_GRID: usize = 10_000;

/// Distribution/spectrum constants feeding the bound formulas.
///
/// `delta2` may be `+∞` when |f′|/f³ is unbounded on the scanned range; the
/// derived `k2` then propagates to `+∞` and any bound using it is vacuous
/// rather than an error. `c` is the exponent constant `min_k f(V_{β_k})²`;
/// it is computed from the same grid scan and can be replaced via
/// [`BoundConstants::with_c`] when a sharper (or theorem-specific) value is
/// available.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundConstants {
    /// Supremum of the spectrum, `C₁ = sup φ`.
    pub c1: f64,
    /// Supremum of the spectrum's first derivative, `C₂ = sup |φ′|`.
    pub c2: f64,
    /// Supremum of the spectrum's second derivative, when the spectrum
    /// provides one.
    pub c3: Option<f64>,
    /// Upper support/truncation point `B` that the scan was capped at.
    pub b: f64,
    /// `δ₁ = 1/min f` over the scanned quantile range.
    pub delta1: f64,
    /// `δ₂ = max |f′|/f³` over the scanned range (possibly `+∞`).
    pub delta2: f64,
    /// First-derivative envelope `K₁ = |B·C₂ + δ₁·C₁|`.
    pub k1: f64,
    /// Second-derivative envelope `K₂ = |B·C₃ + 2δ₁·C₂ + δ₂·C₁|`; absent
    /// when the spectrum has no C₃.
    pub k2: Option<f64>,
    /// Exponent constant `c = min_k f(V_{β_k})²` over the scanned grid.
    pub c: f64,
}

impl BoundConstants {
    /// Builds constants from explicitly supplied ingredients, deriving the
    /// envelopes `k1`/`k2` by the same formulas as the grid scan. Intended
    /// for worked examples and tests where the constants are pinned by hand.
    pub fn manual(
        c1: f64,
        c2: f64,
        c3: Option<f64>,
        b: f64,
        delta1: f64,
        delta2: f64,
        c: f64,
    ) -> Result<Self> {
        for (name, v) in [("C1", c1), ("C2", c2), ("delta1", delta1), ("c", c)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!("constant {name} must be finite and ≥ 0, got {v}")));
            }
        }
        if c1 == 0.0 {
            return Err(Error::Domain("C1 must be positive (φ is a probability density on [0,1])".into()));
        }
        if delta2 < 0.0 || delta2.is_nan() {
            return Err(Error::Domain(format!("delta2 must be ≥ 0 (possibly ∞), got {delta2}")));
        }
        let k1 = (b * c2 + delta1 * c1).abs();
        let k2 = c3.map(|c3| (b * c3 + 2.0 * delta1 * c2 + delta2 * c1).abs());
        Ok(Self { c1, c2, c3, b, delta1, delta2, k1, k2, c })
    }

    /// Replaces the exponent constant `c`, keeping everything else.
    pub fn with_c(mut self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Domain(format!("exponent constant must be finite and > 0, got {c}")));
        }
        self.c = c;
        Ok(self)
    }
}

/// Scans the quantile range of `dist` capped at `support_hi` and assembles
/// [`BoundConstants`] for `spectrum`.
///
/// The scan covers β in `(0, F(B))` via 10⁴ midpoints, where
/// `B = min(support_hi, natural upper bound)`; for laws unbounded below this
/// is the documented surrogate for "the support intersected with (−∞, B]"
/// (an exact infimum over an infinite range does not exist for Gaussian-type
/// tails — the grid min is what the estimator's grid actually sees).
pub fn compute_constants(
    dist: &DistModel,
    spectrum: &Spectrum,
    support_hi: f64,
) -> Result<BoundConstants> {
    compute_constants_over(dist, spectrum, support_hi, 0.0)
}

/// [`compute_constants`] restricted to the quantile range `β ∈ [beta_lo, F(B)]`.
///
/// The CVaR theorems only need the density controlled on `[V_α, B]`, which is
/// this function with `beta_lo = α`; the plain SRM constants use
/// `beta_lo = 0`.
pub fn compute_constants_over(
    dist: &DistModel,
    spectrum: &Spectrum,
    support_hi: f64,
    beta_lo: f64,
) -> Result<BoundConstants> {
    if !support_hi.is_finite() {
        return Err(Error::Domain(format!("support cap must be finite, got {support_hi}")));
    }
    if !(0.0..1.0).contains(&beta_lo) {
        return Err(Error::Domain(format!("quantile-range start must lie in [0, 1), got {beta_lo}")));
    }
    let c1 = spectrum.c1();
    let c2 = spectrum.c2().ok_or_else(|| {
        Error::MissingConstant(format!(
            "spectrum {} has no derivative bound C2; bound constants need a differentiable \
             spectrum (for CVaR-style bounds use the flat spectrum and the (1−α) scaling \
             built into cvar_bound)",
            spectrum.label()
        ))
    })?;
    let c3 = spectrum.c3();

    // Cap at the natural upper end of the support where one exists.
    let b = match *dist {
        DistModel::Uniform { hi, .. } => support_hi.min(hi),
        DistModel::PointMass { .. } => {
            return Err(Error::Unsupported(
                "bound constants need a continuous density; a point mass has none".into(),
            ))
        }
        _ => support_hi,
    };
    let beta_cap = dist.cdf(b).min(1.0);
    if beta_cap <= beta_lo {
        return Err(Error::Domain(format!(
            "support cap {b} leaves an empty quantile range [{beta_lo}, {beta_cap:.6})"
        )));
    }

    let span = beta_cap - beta_lo;
    let mut min_f = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    for j in 0..CONSTANTS_GRID {
        let beta = beta_lo + span * ((j as f64 + 0.5) / CONSTANTS_GRID as f64);
        let x = dist.quantile(beta)?;
        let f = dist.pdf(x)?;
        if !(f > 0.0) {
            return Err(Error::Domain(format!(
                "density vanished at quantile {beta:.6} (x = {x:.6}); constants are undefined"
            )));
        }
        min_f = min_f.min(f);
        let ratio = dist.pdf_deriv(x)?.abs() / (f * f * f);
        max_ratio = max_ratio.max(ratio);
    }

    let delta1 = 1.0 / min_f;
    let delta2 = max_ratio;
    let k1 = (b * c2 + delta1 * c1).abs();
    let k2 = c3.map(|c3| (b * c3 + 2.0 * delta1 * c2 + delta2 * c1).abs());
    let c = min_f * min_f;
    Ok(BoundConstants { c1, c2, c3, b, delta1, delta2, k1, k2, c })
}

/// Worst-case trapezoid discretization error `K₁(b−a)²/(4m)` under a
/// first-derivative envelope `K₁` for the integrand on `[a, b] ⊆ [0, 1]`.
pub fn trapz_error_first(k1: f64, a: f64, b: f64, m: usize) -> Result<f64> {
    check_trapz_args(k1, a, b, m)?;
    let span = b - a;
    Ok(k1 * span * span / (4.0 * m as f64))
}

/// Worst-case trapezoid discretization error `K₂(b−a)³/(12m²)` under a
/// second-derivative envelope `K₂`.
pub fn trapz_error_second(k2: f64, a: f64, b: f64, m: usize) -> Result<f64> {
    check_trapz_args(k2, a, b, m)?;
    let span = b - a;
    let m = m as f64;
    Ok(k2 * span * span * span / (12.0 * m * m))
}

fn check_trapz_args(envelope: f64, a: f64, b: f64, m: usize) -> Result<()> {
    if envelope.is_nan() || envelope < 0.0 {
        return Err(Error::Domain(format!("derivative envelope must be ≥ 0, got {envelope}")));
    }
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::Domain(format!("trapezoid range needs 0 ≤ a ≤ b ≤ 1, got [{a}, {b}]")));
    }
    if m == 0 {
        return Err(Error::Domain("trapezoid error needs at least one subinterval".into()));
    }
    Ok(())
}

/// Two-sided tail bound for one empirical quantile:
/// `P(|V_β − V̂_{n,β}| ≥ ε) ≤ 2·exp(−2n·c̄·ε²)`, where `c̄` reflects the
/// density level near `V_β` (use [`BoundConstants::c`]).
pub fn var_bound(n: usize, epsilon: f64, c_bar: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    if !(c_bar.is_finite() && c_bar > 0.0) {
        return Err(Error::Domain(format!("density constant must be finite and > 0, got {c_bar}")));
    }
    Ok(2.0 * (-2.0 * n as f64 * c_bar * epsilon * epsilon).exp())
}

/// Which derivative envelope a bounded-support bound ties itself to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedKind {
    /// Uses `K₁` (first-derivative envelope); bound `(2K₁/ε)·exp(…)`.
    FirstDeriv,
    /// Uses `K₂` (second-derivative envelope); bound `√(8K₂/3ε)·exp(…)`.
    SecondDeriv,
}

/// CVaR concentration variants: bounded support (two envelope flavours) and
/// the truncated unbounded specializations.
#[derive(Debug, Clone, PartialEq)]
pub enum CvarCase {
    /// Bounded support, first-derivative envelope.
    BoundedFirst,
    /// Bounded support, second-derivative envelope.
    BoundedSecond,
    /// Zero-mean Gaussian tail with scale `sigma ≤ sigma_max`.
    Gaussian { sigma: f64, sigma_max: f64 },
    /// Exponential tail with rate `lambda ≥ lambda_min`.
    Exponential { lambda: f64, lambda_min: f64 },
}

/// One evaluated tail bound: the probability bound itself plus the validity
/// bookkeeping the experiment drivers need.
///
/// `valid` records whether ε clears the theorem's threshold (always true for
/// the bounded-support cases); when it does not, `bound` is `+∞` and `note`
/// explains the failure. `min_m` is the smallest subdivision count the
/// theorem demands — it can be astronomically large for the truncated cases
/// (the formula grows like `exp(ncε²/4)`), so it is kept as a float that may
/// round to `+∞`; use [`TailBoundReport::admits_m`]/[`TailBoundReport::feasible_at`]
/// to compare against concrete grids.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundReport {
    /// Stable identifier of the bound family (e.g. `srm-bounded-first`).
    pub case: &'static str,
    /// Sample size the bound is evaluated at.
    pub n: usize,
    /// Accuracy the tail event is measured at.
    pub epsilon: f64,
    /// The probability bound; `+∞` when `valid` is false.
    pub bound: f64,
    /// Whether ε clears the theorem's validity threshold.
    pub valid: bool,
    /// Whether the bound is vacuous (exceeds 1 or is invalid).
    pub trivial: bool,
    /// Smallest subdivision count the theorem requires (ceiled; may be `+∞`).
    pub min_m: f64,
    /// Human-readable validity remark; empty when nothing is noteworthy.
    pub note: String,
}

impl TailBoundReport {
    /// True when the theorem applies with `m` subdivisions.
    pub fn admits_m(&self, m: usize) -> bool {
        self.valid && (m as f64) >= self.min_m
    }

    /// True when some `m ≤ cap` satisfies the theorem's grid requirement.
    pub fn feasible_at(&self, cap: usize) -> bool {
        self.valid && self.min_m <= cap as f64
    }

    fn new(case: &'static str, n: usize, epsilon: f64, bound: f64, valid: bool, min_m: f64, note: String) -> Self {
        let trivial = !(bound <= 1.0);
        Self { case, n, epsilon, bound, valid, trivial, min_m, note }
    }
}

fn check_tail_args(n: usize, epsilon: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("tail bounds need at least one sample".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    Ok(())
}

/// Tail bound for the trapezoidal SRM estimator on a bounded-support law
/// (samples `≤ B` almost surely, density ≥ 1/δ₁ up to B).
pub fn srm_bound_bounded(
    kind: BoundedKind,
    n: usize,
    epsilon: f64,
    k: &BoundConstants,
) -> Result<TailBoundReport> {
    check_tail_args(n, epsilon)?;
    let decay = (-(n as f64) * k.c * epsilon * epsilon / (2.0 * k.c1 * k.c1)).exp();
    let (case, bound, min_m) = match kind {
        BoundedKind::FirstDeriv => {
            let bound = 2.0 * k.k1 / epsilon * decay;
            ("srm-bounded-first", bound, (k.k1 / (2.0 * epsilon)).ceil().max(1.0))
        }
        BoundedKind::SecondDeriv => {
            let k2 = k.k2.ok_or_else(|| {
                Error::MissingConstant(
                    "second-derivative bound needs K2; the spectrum provides no C3".into(),
                )
            })?;
            let bound = (8.0 * k2 / (3.0 * epsilon)).sqrt() * decay;
            ("srm-bounded-second", bound, (k2 / (6.0 * epsilon)).sqrt().ceil().max(1.0))
        }
    };
    Ok(TailBoundReport::new(case, n, epsilon, bound, true, min_m, String::new()))
}

/// Tail bound for the truncated trapezoidal SRM estimator under a zero-mean
/// Gaussian law with scale `sigma ≤ sigma_max`.
///
/// Valid only for `ε > 2σC₁/√n`; below the threshold the report carries
/// `valid = false` and an infinite bound instead of failing.
pub fn srm_bound_gaussian(
    n: usize,
    epsilon: f64,
    sigma: f64,
    sigma_max: f64,
    k: &BoundConstants,
) -> Result<TailBoundReport> {
    check_tail_args(n, epsilon)?;
    check_scale("sigma", sigma, sigma_max)?;
    let nf = n as f64;
    let threshold = 2.0 * sigma * k.c1 / nf.sqrt();
    let min_m = (0.2 * (sigma_max / epsilon).sqrt()
        * (nf * k.c * epsilon * epsilon / (4.0 * k.c1 * k.c1)).exp())
    .ceil()
    .max(1.0);
    if epsilon <= threshold {
        return Ok(TailBoundReport::new(
            "srm-gaussian",
            n,
            epsilon,
            f64::INFINITY,
            false,
            min_m,
            format!("epsilon {epsilon:.6} does not exceed the validity threshold 2σC1/√n = {threshold:.6}"),
        ));
    }
    let gap = epsilon - threshold;
    let prefactor =
        2.0 * sigma * ((2.0 * nf.ln()).sqrt() * k.c2 + (2.0 * std::f64::consts::PI).sqrt() * nf * k.c1)
            / gap;
    let bound = prefactor * (-nf * k.c * gap * gap / (2.0 * k.c1 * k.c1)).exp();
    Ok(TailBoundReport::new("srm-gaussian", n, epsilon, bound, true, min_m, String::new()))
}

/// Tail bound for the truncated trapezoidal SRM estimator under an
/// exponential law with rate `lambda ≥ lambda_min`.
///
/// Valid only for `ε > C₁(n+1)/(λn)`.
pub fn srm_bound_exponential(
    n: usize,
    epsilon: f64,
    lambda: f64,
    lambda_min: f64,
    k: &BoundConstants,
) -> Result<TailBoundReport> {
    check_tail_args(n, epsilon)?;
    check_rate(lambda, lambda_min)?;
    let nf = n as f64;
    let threshold = k.c1 * (nf + 1.0) / (lambda * nf);
    let min_m = (0.125 * (1.0 / (lambda_min * epsilon)).sqrt()
        * (nf * k.c * epsilon * epsilon / (4.0 * k.c1 * k.c1)).exp())
    .ceil()
    .max(1.0);
    if epsilon <= threshold {
        return Ok(TailBoundReport::new(
            "srm-exponential",
            n,
            epsilon,
            f64::INFINITY,
            false,
            min_m,
            format!("epsilon {epsilon:.6} does not exceed the validity threshold C1(n+1)/(λn) = {threshold:.6}"),
        ));
    }
    let gap = epsilon - threshold;
    let prefactor = 2.0 * (nf.ln() * k.c2 / lambda + nf * k.c1) / gap;
    let bound = prefactor * (-nf * k.c * gap * gap / (2.0 * k.c1 * k.c1)).exp();
    Ok(TailBoundReport::new("srm-exponential", n, epsilon, bound, true, min_m, String::new()))
}

/// Tail bounds for the trapezoidal CVaR estimator at level `alpha`.
///
/// These are the SRM bounds specialized to the step spectrum: the spectrum
/// constants drop out (`C₁ = 1/(1−α)` cancels into the (1−α) prefactors and
/// the exponent simplifies to `−ncε²/2`), so `k` should carry constants
/// computed for the *flat* spectrum over the tail quantile range
/// ([`compute_constants_over`] with `beta_lo = alpha`).
pub fn cvar_bound(
    case: &CvarCase,
    alpha: f64,
    n: usize,
    epsilon: f64,
    k: &BoundConstants,
) -> Result<TailBoundReport> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("CVaR level must lie in (0, 1), got {alpha}")));
    }
    check_tail_args(n, epsilon)?;
    let nf = n as f64;
    let tail = 1.0 - alpha;
    let decay = (-nf * k.c * epsilon * epsilon / 2.0).exp();
    match *case {
        CvarCase::BoundedFirst => {
            let bound = 2.0 * k.k1 * tail / epsilon * decay;
            let min_m = (k.k1 * tail / (2.0 * epsilon)).ceil().max(1.0);
            Ok(TailBoundReport::new("cvar-bounded-first", n, epsilon, bound, true, min_m, String::new()))
        }
        CvarCase::BoundedSecond => {
            let k2 = k.k2.ok_or_else(|| {
                Error::MissingConstant(
                    "second-derivative CVaR bound needs K2; compute constants with a spectrum \
                     providing C3 (the flat spectrum does)"
                        .into(),
                )
            })?;
            let bound = (8.0 * k2 * tail * tail / (3.0 * epsilon)).sqrt() * decay;
            let min_m = (k2 * tail * tail / (6.0 * epsilon)).sqrt().ceil().max(1.0);
            Ok(TailBoundReport::new("cvar-bounded-second", n, epsilon, bound, true, min_m, String::new()))
        }
        CvarCase::Gaussian { sigma, sigma_max } => {
            check_scale("sigma", sigma, sigma_max)?;
            let threshold = 2.0 * sigma / (tail * nf.sqrt());
            let min_m = (0.2 * (sigma_max * tail / epsilon).sqrt()
                * (nf * k.c * epsilon * epsilon / 4.0).exp())
            .ceil()
            .max(1.0);
            if epsilon <= threshold {
                return Ok(TailBoundReport::new(
                    "cvar-gaussian",
                    n,
                    epsilon,
                    f64::INFINITY,
                    false,
                    min_m,
                    format!(
                        "epsilon {epsilon:.6} does not exceed the validity threshold 2σ/((1−α)√n) = {threshold:.6}"
                    ),
                ));
            }
            let gap = epsilon - threshold;
            let bound = 2.0 * tail * sigma * (2.0 * std::f64::consts::PI).sqrt() * nf / gap
                * (-nf * k.c * gap * gap / 2.0).exp();
            Ok(TailBoundReport::new("cvar-gaussian", n, epsilon, bound, true, min_m, String::new()))
        }
        CvarCase::Exponential { lambda, lambda_min } => {
            check_rate(lambda, lambda_min)?;
            let threshold = (nf + 1.0) / (tail * lambda * nf);
            let min_m = (0.125 * (tail / (lambda_min * epsilon)).sqrt()
                * (nf * k.c * epsilon * epsilon / 4.0).exp())
            .ceil()
            .max(1.0);
            if epsilon <= threshold {
                return Ok(TailBoundReport::new(
                    "cvar-exponential",
                    n,
                    epsilon,
                    f64::INFINITY,
                    false,
                    min_m,
                    format!(
                        "epsilon {epsilon:.6} does not exceed the validity threshold (n+1)/((1−α)λn) = {threshold:.6}"
                    ),
                ));
            }
            let gap = epsilon - threshold;
            let bound = 2.0 * tail * nf / gap * (-nf * k.c * gap * gap / 2.0).exp();
            Ok(TailBoundReport::new("cvar-exponential", n, epsilon, bound, true, min_m, String::new()))
        }
    }
}

fn check_scale(name: &str, value: f64, max: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")));
    }
    if !(max.is_finite() && max >= value) {
        return Err(Error::Domain(format!("{name}_max must be finite and ≥ {name} = {value}, got {max}")));
    }
    Ok(())
}

fn check_rate(lambda: f64, lambda_min: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be finite and > 0, got {lambda}")));
    }
    if !(lambda_min > 0.0 && lambda_min <= lambda) {
        return Err(Error::Domain(format!(
            "lambda_min must satisfy 0 < lambda_min ≤ lambda = {lambda}, got {lambda_min}"
        )));
    }
    Ok(())
}
