//! Fixed-budget best-arm identification driven by a risk functional.
//!
//! The algorithm is successive rejects: split the budget into K−1 phases,
//! pull every surviving arm equally often within a phase, and at the end of
//! each phase eliminate the arm whose *risk estimate* is worst (largest —
//! samples are losses). What distinguishes this from the classic mean-based
//! variant is only the per-arm statistic: any [`RiskFunctional`] (mean, CVaR,
//! or a spectral risk measure) can drive the eliminations.
//!
//! Randomness is structured for reproducibility: arm i draws from the child
//! stream `(env.rng_seed, i)`, so eliminating one arm never shifts another
//! arm's future samples, and tie-breaks consume a dedicated stream that
//! advances only when a tie actually occurs.

use crate::dist::DistModel;
use crate::estimators::{cvar_trapz, srm_trapz};
use crate::samples::OrderedSamples;
use crate::seeds::{child_seed, rng_from_seed, uniform_index, unit_open};
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Stream tag for the tie-break RNG; arm indices are small, so this cannot
/// collide with an arm's own stream.
const TIE_STREAM: u64 = u64::MAX;

/// A bandit environment: one loss distribution per arm plus the base seed
/// all per-arm streams derive from.
#[derive(Debug, Clone)]
pub struct ArmEnv {
    /// Loss distribution of each arm, indexed by arm id.
    pub arms: Vec<DistModel>,
    /// Base seed; arm i samples from the child stream `(rng_seed, i)`.
    pub rng_seed: u64,
    /// Optionally, the arm an experiment counts as the correct answer.
    pub declared_best: Option<usize>,
}

impl ArmEnv {
    /// Environment over `arms` (at least two) with the given base seed.
    pub fn new(arms: Vec<DistModel>, rng_seed: u64) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::Config(format!(
                "an environment needs at least two arms, got {}",
                arms.len()
            )));
        }
        Ok(Self { arms, rng_seed, declared_best: None })
    }

    /// Declares which arm counts as correct for P(correct) summaries.
    pub fn with_declared_best(mut self, arm: usize) -> Result<Self> {
        if arm >= self.arms.len() {
            return Err(Error::Config(format!(
                "declared best arm {arm} out of range for {} arms",
                self.arms.len()
            )));
        }
        self.declared_best = Some(arm);
        Ok(self)
    }

    /// Parses an environment file: one `family:params` arm per line, with
    /// blank lines and `#` comments ignored; an optional `best <idx>` line
    /// declares the correct arm.
    pub fn parse_text(text: &str, rng_seed: u64) -> Result<Self> {
        let mut arms = Vec::new();
        let mut best = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("best") {
                let rest = rest.trim();
                best = Some(rest.parse::<usize>().map_err(|_| {
                    Error::Config(format!("environment line {}: bad best-arm index {rest:?}", idx + 1))
                })?);
                continue;
            }
            arms.push(DistModel::parse(line).map_err(|e| {
                Error::Config(format!("environment line {}: {e}", idx + 1))
            })?);
        }
        let env = Self::new(arms, rng_seed)?;
        match best {
            Some(b) => env.with_declared_best(b),
            None => Ok(env),
        }
    }

    /// Number of arms K.
    pub fn k(&self) -> usize {
        self.arms.len()
    }
}

/// The statistic an arm is judged by. Samples are losses, so in every case
/// larger is worse.
#[derive(Debug, Clone)]
pub enum RiskFunctional {
    /// Plain sample mean (the classic successive-rejects criterion).
    Mean,
    /// Trapezoidal CVaR at level `alpha`.
    Cvar { alpha: f64 },
    /// Trapezoidal spectral risk under `spectrum`.
    Srm { spectrum: Spectrum },
}

impl RiskFunctional {
    /// Parses `mean`, `cvar:α`, or `srm:<spectrum spec>` (e.g. `srm:expk:5`).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "mean" {
            return Ok(Self::Mean);
        }
        if let Some(alpha) = spec.strip_prefix("cvar:") {
            let alpha: f64 = alpha
                .parse()
                .map_err(|_| Error::Config(format!("bad CVaR level in functional {spec:?}")))?;
            if !(0.0 < alpha && alpha < 1.0) {
                return Err(Error::Config(format!("CVaR level must lie in (0, 1), got {alpha}")));
            }
            return Ok(Self::Cvar { alpha });
        }
        if let Some(spectrum_spec) = spec.strip_prefix("srm:") {
            return Ok(Self::Srm { spectrum: Spectrum::parse(spectrum_spec)? });
        }
        Err(Error::Config(format!(
            "unknown functional {spec:?}; expected mean, cvar:α, or srm:<spectrum>"
        )))
    }

    /// Estimates the functional from a batch; `m` is the subdivision count
    /// for the quadrature-based functionals and is ignored by the mean.
    pub fn estimate(&self, samples: &OrderedSamples, m: usize) -> Result<f64> {
        match self {
            Self::Mean => {
                Ok(samples.values().iter().sum::<f64>() / samples.n() as f64)
            }
            Self::Cvar { alpha } => cvar_trapz(samples, *alpha, m),
            Self::Srm { spectrum } => srm_trapz(samples, spectrum, m),
        }
    }

    /// The functional's exact value under a known distribution; used to
    /// calibrate which arm an environment's correct answer is.
    pub fn analytic(&self, dist: &DistModel) -> Result<f64> {
        match self {
            Self::Mean => Ok(dist.mean()),
            Self::Cvar { alpha } => dist.analytic_cvar(*alpha),
            Self::Srm { spectrum } => dist.analytic_srm(spectrum, 1e-8),
        }
    }

    /// Canonical spec string (`mean`, `cvar:0.95`, `srm:expk:5`).
    pub fn label(&self) -> String {
        match self {
            Self::Mean => "mean".into(),
            Self::Cvar { alpha } => format!("cvar:{alpha}"),
            Self::Srm { spectrum } => format!("srm:{}", spectrum.label()),
        }
    }
}

/// Everything one successive-rejects run did, for auditing and reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SrTrace {
    /// Cumulative per-arm sample targets n_1 ≤ … ≤ n_{K−1}.
    pub phase_lengths: Vec<usize>,
    /// Arm eliminated at the end of each phase, in order.
    pub eliminated: Vec<usize>,
    /// Per phase, the `(arm, estimate)` pairs for every arm that was still
    /// active during that phase.
    pub estimates: Vec<Vec<(usize, f64)>>,
    /// The single arm surviving all K−1 phases.
    pub winner: usize,
    /// Total samples drawn; never exceeds the budget.
    pub total_pulls: usize,
}

/// Cumulative per-arm sample counts n_1 ≤ … ≤ n_{K−1} for budget `n` over
/// `k` arms: `n_j = ⌈(n−K)/(loḡ(K)·(K+1−j))⌉` with
/// `loḡ(K) = 1/2 + Σ_{i=2}^K 1/i`.
///
/// Ceiling never under-allocates a phase; a final audit verifies the implied
/// pull count stays within `n`, trimming the last phase if it ever did not
/// (with this allocation the audit provably never trims, since the total is
/// at most `K−1 + (n−K)·(1/2 + Σ 1/i)/loḡ(K) < n`; the audit stays as a
/// guard against a future change to the rounding).
pub fn phase_lengths(n: usize, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Domain(format!("successive rejects needs at least 2 arms, got {k}")));
    }
    if n <= k {
        return Err(Error::Domain(format!(
            "budget {n} cannot cover even one pull per arm beyond initialization for {k} arms"
        )));
    }
    let log_bar: f64 = 0.5 + (2..=k).map(|i| 1.0 / i as f64).sum::<f64>();
    let spare = (n - k) as f64;
    let mut cumulative = Vec::with_capacity(k - 1);
    for phase in 1..k {
        let share = spare / (log_bar * (k + 1 - phase) as f64);
        cumulative.push(share.ceil() as usize);
    }

    // Budget audit: phase j pulls (K+1−j)·(n_j − n_{j−1}) samples.
    let mut total = pull_total(&cumulative, k);
    while total > n {
        let last = cumulative.len() - 1;
        let floor = if last == 0 { 1 } else { cumulative[last - 1] };
        if cumulative[last] <= floor {
            return Err(Error::Domain(format!(
                "budget {n} is too small to audit a schedule for {k} arms"
            )));
        }
        cumulative[last] -= 1;
        total = pull_total(&cumulative, k);
    }
    Ok(cumulative)
}

fn pull_total(cumulative: &[usize], k: usize) -> usize {
    let mut prev = 0;
    let mut total = 0;
    for (idx, &target) in cumulative.iter().enumerate() {
        let survivors = k - idx;
        total += survivors * (target - prev);
        prev = target;
    }
    total
}

/// Runs successive rejects over `env` with budget `n`, judging arms by
/// `functional` estimated with `m` subdivisions on each arm's cumulative
/// samples. Deterministic given `(env.rng_seed, n, m, functional)`.
pub fn successive_rejects(
    env: &ArmEnv,
    n: usize,
    m: usize,
    functional: &RiskFunctional,
) -> Result<SrTrace> {
    let k = env.k();
    if m == 0 {
        return Err(Error::Domain("subdivision count m must be at least 1".into()));
    }
    let schedule = phase_lengths(n, k)?;

    let mut arm_rngs: Vec<_> = (0..k)
        .map(|arm| rng_from_seed(child_seed(env.rng_seed, arm as u64)))
        .collect();
    let mut tie_rng = rng_from_seed(child_seed(env.rng_seed, TIE_STREAM));
    let mut buffers: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut active: Vec<usize> = (0..k).collect();
    let mut eliminated = Vec::with_capacity(k - 1);
    let mut estimates = Vec::with_capacity(k - 1);
    let mut total_pulls = 0usize;
    let mut prev_target = 0usize;

    for &target in &schedule {
        let pulls = target - prev_target;
        prev_target = target;
        for &arm in &active {
            let dist = &env.arms[arm];
            let rng = &mut arm_rngs[arm];
            for _ in 0..pulls {
                // unit_open never returns 0 or 1, so the quantile is defined.
                buffers[arm].push(dist.quantile(unit_open(rng))?);
            }
            total_pulls += pulls;
        }

        let mut phase_estimates = Vec::with_capacity(active.len());
        for &arm in &active {
            let samples = OrderedSamples::from_unsorted(buffers[arm].clone())?;
            phase_estimates.push((arm, functional.estimate(&samples, m)?));
        }

        let worst = phase_estimates
            .iter()
            .map(|&(_, est)| est)
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = phase_estimates
            .iter()
            .filter(|&&(_, est)| est == worst)
            .map(|&(arm, _)| arm)
            .collect();
        let victim = if tied.len() == 1 {
            tied[0]
        } else {
            tied[uniform_index(&mut tie_rng, tied.len())]
        };

        estimates.push(phase_estimates);
        active.retain(|&arm| arm != victim);
        eliminated.push(victim);
    }

    debug_assert_eq!(active.len(), 1);
    debug_assert!(total_pulls <= n);
    Ok(SrTrace {
        phase_lengths: schedule,
        eliminated,
        estimates,
        winner: active[0],
        total_pulls,
    })
}
