//! Acceptance suite: one test per shipping criterion, each printing a
//! single `ACCEPTANCE <k>: PASS/FAIL — detail` line before asserting.
//!
//! Criteria 1–3 measure this implementation against previously published
//! reference numbers that were themselves produced by a Monte Carlo run,
//! not by exact arithmetic. Where those references are irreconcilable with
//! the analytic ground truth (see the per-clause details), the clause is
//! left to fail honestly rather than widening the tolerance until it turns
//! green. Run with `-- --nocapture` to see the PASS lines too.

use std::process::Command;

use srisk::bandit::RiskFunctional;
use srisk::bounds;
use srisk::dist::DistModel;
use srisk::estimators::{classic_cvar, cvar_trapz, empirical_var, srm_trapz};
use srisk::harness::{benchmark_route_env, run_bai, run_coverage, run_curve, run_table, BaiConfig, ExperimentConfig};
use srisk::samples::{OrderedSamples, Partition};
use srisk::seeds::{child_seed, rng_from_seed, unit_open};
use srisk::spectrum::Spectrum;

/// Acceptance targets: externally published SRM values for the four
/// benchmark distributions, with the tolerance each row is held to.
/// The publication's own numbers came from a seeded simulation, so two of
/// them disagree with the analytic integrals by ~1.0–1.1 (details below);
/// they are kept verbatim here.
const SRM_TARGETS: [(&str, f64, f64); 4] = [
    ("exp:0.2", 10.99, 0.5),
    ("gaussian:0,100", 107.36, 1.0),
    ("exp:0.01", 221.30, 0.5),
    ("uniform:-1000,1000", 612.47, 0.5),
];

/// Published per-replication standard deviations for the n = 10⁴ table, in
/// the same row order as `table_defaults` (Exp(0.2), N(0,100), Exp(0.01),
/// U(−10³,10³)).
const PUBLISHED_SPREADS: [f64; 4] = [1.21, 1.32, 2.47, 4.91];

fn verdict(k: usize, ok: bool, detail: &str) {
    let line = format!("ACCEPTANCE {k}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    println!("{line}");
    assert!(ok, "{line}");
}

#[test]
fn acceptance_1_oracle_reference_targets() {
    let spectrum = Spectrum::exponential(5.0).unwrap();
    let started = std::time::Instant::now();
    let mut clauses = Vec::new();
    let mut ok = true;
    for (spec, target, tol) in SRM_TARGETS {
        let dist = DistModel::parse(spec).unwrap();
        let got = dist.analytic_srm(&spectrum, 1e-8).unwrap();
        let diff = (got - target).abs();
        let row_ok = diff <= tol;
        // Exp(0.01) and U(−10³,10³) cannot meet ±0.5: the analytic values
        // are 220.264… and 613.567…, i.e. 1.036 and 1.097 away from the
        // published simulation numbers. 20·S(Exp(0.2)) = 220.264 pins the
        // first by positive homogeneity, and the uniform integral has the
        // closed form −1000 + 2000·∫φβ dβ, so the gap is in the targets.
        ok &= row_ok;
        clauses.push(format!("{spec}: |{got:.4} − {target}| = {diff:.4} (±{tol})"));
    }
    let elapsed = started.elapsed();
    let time_ok = elapsed.as_secs_f64() < 5.0;
    ok &= time_ok;
    clauses.push(format!("runtime {elapsed:.2?} (< 5 s)"));
    verdict(1, ok, &clauses.join("; "));
}

#[test]
fn acceptance_2_estimation_table_reproduction() {
    let started = std::time::Instant::now();
    let cfg = ExperimentConfig::table_defaults(20_260_814);
    let rows = run_table(&cfg).unwrap();
    assert_eq!(rows.len(), 4);

    let mut clauses = Vec::new();
    let mut ok = true;
    for (row, published_sd) in rows.iter().zip(PUBLISHED_SPREADS) {
        // "Within 3 reported standard errors": the published table reports
        // the per-replication spread (its ± on an n = 10⁴ estimate is ~1.2,
        // which a mean over 10³ replications would undercut thirtyfold), so
        // the same column of this run is the yardstick.
        let within = (row.mean_estimate - row.oracle).abs() <= 3.0 * row.rep_std;
        // Spread within a factor 2 of the published value. Exp(0.2) cannot
        // pass: positive homogeneity forces sd(Exp(0.2)) = sd(Exp(0.01))/20
        // ≈ 0.11, while the published pair (1.21, 2.47) is off by 10× from
        // that identity; the other three rows agree within ~10%.
        let ratio = row.rep_std / published_sd;
        let factor_ok = (0.5..=2.0).contains(&ratio);
        ok &= within && factor_ok;
        clauses.push(format!(
            "{}: mean {:.4} vs oracle {:.4} (3σ = {:.4}){}; spread {:.3} vs {published_sd} (×{:.2}){}",
            row.dist,
            row.mean_estimate,
            row.oracle,
            3.0 * row.rep_std,
            if within { "" } else { " ✗" },
            row.rep_std,
            ratio,
            if factor_ok { "" } else { " ✗" },
        ));
    }
    let elapsed = started.elapsed();
    let time_ok = elapsed.as_secs_f64() < 600.0;
    ok &= time_ok;
    clauses.push(format!("runtime {elapsed:.1?} (< 10 min)"));
    verdict(2, ok, &clauses.join("; "));
}

#[test]
fn acceptance_3_error_curve_trends() {
    let started = std::time::Instant::now();
    let cfg = ExperimentConfig::curve_defaults(31_337);
    let points = run_curve(&cfg).unwrap();

    let mut clauses = Vec::new();
    let mut ok = true;
    for m in [150usize, 500] {
        let series: Vec<_> = points.iter().filter(|p| p.m == m).collect();
        assert_eq!(series.len(), 7);
        let decreasing = series.windows(2).all(|w| w[1].mean_abs_error < w[0].mean_abs_error);
        ok &= decreasing;
        clauses.push(format!(
            "m={m} strictly decreasing: {}{}",
            series.iter().map(|p| format!("{:.4}", p.mean_abs_error)).collect::<Vec<_>>().join(" > "),
            if decreasing { "" } else { " ✗" },
        ));
    }
    // Curve overlap at every n: |mae₁₅₀ − mae₅₀₀| ≤ 2·√(se₁₅₀² + se₅₀₀²).
    // At large n the statistical band shrinks like 1/√(nR) while the two
    // subdivision counts keep a fixed discretization offset, so if the
    // offset is resolvable anywhere it will be at n = 10⁴.
    for &n in &cfg.n_list {
        let at = |m: usize| points.iter().find(|p| p.n == n && p.m == m).unwrap();
        let (a, b) = (at(150), at(500));
        let gap = (a.mean_abs_error - b.mean_abs_error).abs();
        let pooled = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        let overlap = gap <= 2.0 * pooled;
        ok &= overlap;
        clauses.push(format!(
            "n={n}: |Δ| = {gap:.5} vs 2·pooled = {:.5}{}",
            2.0 * pooled,
            if overlap { "" } else { " ✗" },
        ));
    }
    let elapsed = started.elapsed();
    ok &= elapsed.as_secs_f64() < 600.0;
    clauses.push(format!("runtime {elapsed:.1?} (< 10 min)"));
    verdict(3, ok, &clauses.join("; "));
}

#[test]
fn acceptance_4_discretization_error_budget() {
    // Exact quantiles on Uniform(0,1) + expk:5: the measured trapezoid
    // error must sit under K₂(b−a)³/(12m²) and decay like m⁻².
    let dist = DistModel::Uniform { lo: 0.0, hi: 1.0 };
    let spectrum = Spectrum::exponential(5.0).unwrap();
    let truth = dist.analytic_srm(&spectrum, 1e-10).unwrap();
    let k = bounds::compute_constants(&dist, &spectrum, 1.0).unwrap();

    let mut clauses = Vec::new();
    let mut ok = true;
    let mut errors = Vec::new();
    for m in [4usize, 16, 64] {
        let grid = Partition::new(0.0, 1.0, m).unwrap();
        let mut acc = 0.0;
        for j in 0..m {
            let (b0, b1) = (grid.point(j), grid.point(j + 1));
            // True quantile of U(0,1) with its support endpoints at β ∈ {0, 1}.
            let q = |beta: f64| {
                if beta <= 0.0 {
                    0.0
                } else if beta >= 1.0 {
                    1.0
                } else {
                    dist.quantile(beta).unwrap()
                }
            };
            acc += 0.5 * grid.delta() * (spectrum.eval(b0) * q(b0) + spectrum.eval(b1) * q(b1));
        }
        let err = (acc - truth).abs();
        let budget = bounds::trapz_error_second(k.k2.unwrap(), 0.0, 1.0, m).unwrap();
        let under = err <= budget;
        ok &= under;
        errors.push(err);
        clauses.push(format!("m={m}: error {err:.3e} ≤ budget {budget:.3e}{}", if under { "" } else { " ✗" }));
    }
    let slope = (errors[2] / errors[0]).ln() / (64f64 / 4.0).ln();
    let slope_ok = (slope - (-2.0)).abs() <= 0.3;
    ok &= slope_ok;
    clauses.push(format!("log-log slope {slope:.3} (−2 ± 0.3){}", if slope_ok { "" } else { " ✗" }));
    verdict(4, ok, &clauses.join("; "));
}

#[test]
fn acceptance_5_concentration_coverage() {
    // One representative of each bound family, ε calibrated so the bound
    // lies in [0.05, 0.5], m ≥ min_m (capped at 10⁶), 10⁴ replications:
    // the empirical tail frequency must not exceed the bound, and any
    // (ε, m)-infeasible tuple must still be reported as a row.
    let cfg = ExperimentConfig::coverage_defaults(808);
    let rows = run_coverage(&cfg).unwrap();
    assert_eq!(rows.len(), 6, "three families × two sample sizes");

    let mut clauses = Vec::new();
    let mut ok = true;
    for row in &rows {
        if !(row.valid && row.feasible) {
            // Reported-not-skipped is the requirement for such tuples;
            // with auto-calibrated ε none arise for these families.
            clauses.push(format!("{} n={}: infeasible, reported ({})", row.case, row.n, row.note));
            continue;
        }
        let in_band = (0.05..=0.5).contains(&row.bound);
        let granted = row.empirical.is_some_and(|f| f <= row.bound);
        let m_ok = (row.m as f64) >= row.min_m && row.m <= 1_000_000;
        ok &= in_band && granted && m_ok;
        clauses.push(format!(
            "{} n={}: P̂ = {:.4} ≤ bound {:.3} at ε = {:.3}, m = {} ≥ {}{}",
            row.case,
            row.n,
            row.empirical.unwrap(),
            row.bound,
            row.epsilon,
            row.m,
            row.min_m,
            if in_band && granted && m_ok { "" } else { " ✗" },
        ));
    }
    verdict(5, ok, &clauses.join("; "));
}

#[test]
fn acceptance_6_cvar_estimator_consistency() {
    // Exponential(1), n = 10⁴, α = 0.9, 100 seeds: the classic estimator
    // and the m = 1000 trapezoid agree within 0.05 on average, and both
    // means sit within 3 standard errors of the analytic CVaR.
    let dist = DistModel::Exponential { rate: 1.0 };
    let analytic = dist.analytic_cvar(0.9).unwrap();
    let mut classic = Vec::with_capacity(100);
    let mut trapz = Vec::with_capacity(100);
    for i in 0..100u64 {
        let samples = dist.sample(10_000, child_seed(2026, i)).unwrap();
        classic.push(classic_cvar(&samples, 0.9).unwrap());
        trapz.push(cvar_trapz(&samples, 0.9, 1000).unwrap());
    }
    let stats = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
        (mean, sd / (v.len() as f64).sqrt())
    };
    let gap = classic.iter().zip(&trapz).map(|(a, b)| (a - b).abs()).sum::<f64>() / 100.0;
    let (c_mean, c_se) = stats(&classic);
    let (t_mean, t_se) = stats(&trapz);
    let agree = gap <= 0.05;
    let c_ok = (c_mean - analytic).abs() <= 3.0 * c_se;
    let t_ok = (t_mean - analytic).abs() <= 3.0 * t_se;
    verdict(
        6,
        agree && c_ok && t_ok,
        &format!(
            "mean |classic − trapz| = {gap:.4} (≤ 0.05); classic {c_mean:.4} vs {analytic:.4} (3se = {:.4}); trapz {t_mean:.4} (3se = {:.4})",
            3.0 * c_se,
            3.0 * t_se,
        ),
    );
}

#[test]
fn acceptance_7_estimator_algebra() {
    // 10³ randomized inputs per property, driven by the library's own
    // seeded stream so the acceptance record is reproducible.
    let spectrum = Spectrum::exponential(5.0).unwrap();
    let flat = Spectrum::flat();
    let mut rng = rng_from_seed(0xA1_6EB_4A);
    let mut fails = [0usize; 4];
    for _ in 0..1000 {
        let n = 1 + (unit_open(&mut rng) * 150.0) as usize;
        let m = 1 + (unit_open(&mut rng) * 60.0) as usize;
        let xs: Vec<f64> = (0..n).map(|_| (unit_open(&mut rng) - 0.3) * 200.0).collect();
        let samples = OrderedSamples::from_unsorted(xs.clone()).unwrap();
        let base = srm_trapz(&samples, &spectrum, m).unwrap();

        // Positive homogeneity, exact for a power-of-two scale.
        let lambda = 4.0;
        let scaled = OrderedSamples::from_unsorted(xs.iter().map(|x| lambda * x).collect()).unwrap();
        if srm_trapz(&scaled, &spectrum, m).unwrap() != lambda * base {
            fails[0] += 1;
        }
        // Translation under the flat spectrum.
        let c = (unit_open(&mut rng) - 0.5) * 100.0;
        let shifted = OrderedSamples::from_unsorted(xs.iter().map(|x| x + c).collect()).unwrap();
        let lhs = srm_trapz(&shifted, &flat, m).unwrap();
        let rhs = srm_trapz(&samples, &flat, m).unwrap() + c;
        if (lhs - rhs).abs() > 1e-12 * (lhs.abs() + c.abs()).max(1.0) {
            fails[1] += 1;
        }
        // Monotonicity under pointwise domination.
        let raised =
            OrderedSamples::from_unsorted(xs.iter().map(|x| x + unit_open(&mut rng) * 10.0).collect())
                .unwrap();
        if srm_trapz(&raised, &spectrum, m).unwrap() < base {
            fails[2] += 1;
        }
        // Empirical quantile monotone in β.
        let (b0, b1) = (unit_open(&mut rng), unit_open(&mut rng));
        let (lo, hi) = if b0 <= b1 { (b0, b1) } else { (b1, b0) };
        if empirical_var(&samples, lo).unwrap() > empirical_var(&samples, hi).unwrap() {
            fails[3] += 1;
        }
    }
    let ok = fails == [0; 4];
    verdict(
        7,
        ok,
        &format!(
            "1000 cases each: homogeneity {} fails, translation {} fails, monotonicity {} fails, quantile-monotone {} fails",
            fails[0], fails[1], fails[2], fails[3]
        ),
    );
}

#[test]
fn acceptance_8_risk_driven_arm_identification() {
    // The calibrated five-route environment dissociates the mean-optimal
    // arm (3) from the SRM-optimal arm (1); successive rejects with the
    // SRM functional must find the latter in ≥ 80% of 500 budget-1000 runs
    // without ever overspending.
    let env = benchmark_route_env(404);
    let spectrum = Spectrum::exponential(5.0).unwrap();
    let mean_best = (0..5)
        .min_by(|&a, &b| env.arms[a].mean().total_cmp(&env.arms[b].mean()))
        .unwrap();
    let srm_best = (0..5)
        .min_by(|&a, &b| {
            let s = |i: usize| env.arms[i].analytic_srm(&spectrum, 1e-7).unwrap();
            s(a).total_cmp(&s(b))
        })
        .unwrap();
    assert_ne!(mean_best, srm_best, "environment must dissociate the two optima");

    let cfg = BaiConfig {
        env,
        functional: RiskFunctional::Srm { spectrum },
        budget: 1000,
        m: 100,
        runs: 500,
        base_seed: 404,
    };
    let summary = run_bai(&cfg).unwrap();
    let budget_ok = summary.per_run.iter().all(|r| r.total_pulls <= 1000);
    let p_correct = summary.p_correct.expect("best arm is defined");
    let ok = summary.best_arm == Some(srm_best) && p_correct >= 0.8 && budget_ok;
    verdict(
        8,
        ok,
        &format!(
            "P(correct) = {:.3} (≥ 0.8) over {} runs; mean-optimal arm {mean_best} ≠ SRM-optimal arm {srm_best}; max pulls {} ≤ 1000",
            p_correct,
            summary.per_run.len(),
            summary.per_run.iter().map(|r| r.total_pulls).max().unwrap(),
        ),
    );
}

#[test]
fn acceptance_9_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_srisk"))
            .args([
                "coverage", "--dist", "uniform:0,1", "--n", "500", "--epsilon", "0.7",
                "--reps", "2000", "--seed", "55", "--format", "jsonl",
                "--out", path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let a = run("a.jsonl");
    let b = run("b.jsonl");
    let ok = !a.is_empty() && a == b;
    verdict(9, ok, &format!("two seeded coverage runs, {} bytes each, identical: {}", a.len(), a == b));
}
