//! Risk-aversion spectra φ: weight functions on [0,1] with declared
//! derivative bounds.
//!
//! A coherent risk-aversion function is nonnegative, nondecreasing and
//! integrates to 1; the bounds in [`crate::bounds`] additionally need
//! envelopes C1 ≥ sup|φ|, C2 ≥ sup|φ′| and C3 ≥ sup|φ″|. Three kinds are
//! supported:
//!
//! - [`Spectrum::exponential`] — φ(β) = k·e^{−k(1−β)}/(1−e^{−k}), the
//!   smooth exponential risk-aversion family (C1 = k/(1−e^{−k}),
//!   C2 = k·C1, C3 = k²·C1);
//! - [`Spectrum::cvar`] — the CVaR indicator φ(β) = 1{β > α}/(1−α),
//!   with C1 = 1/(1−α) and no derivative bounds (the step is not
//!   differentiable, so C2/C3 stay undeclared);
//! - [`Spectrum::custom`] — a piecewise-linear β → φ table with
//!   caller-declared constants, loadable from a plain-text file.
//!
//! Declared C1 values are always validated against a dense evaluation
//! grid. C2/C3 are analytic inputs and are trusted as declared: they are
//! not estimable from point evaluations.

use crate::{Error, Result};

/// Points in the validation grid (and the coherence-check trapezoid).
const GRID: usize = 10_000;

/// Absolute slack when comparing declared constants against grid maxima,
/// to keep exact-equality declarations (C1 = max φ) from tripping on
/// floating-point noise.
const GRID_SLACK: f64 = 1e-9;

/// Which analytic family a spectrum belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    /// φ(β) = k·e^{−k(1−β)}/(1−e^{−k}).
    ExponentialRiskAversion { k: f64 },
    /// φ(β) = 1{β > α}/(1−α).
    CvarIndicator { alpha: f64 },
    /// Piecewise-linear interpolation of a declared table.
    Custom,
}

/// An evaluable risk-aversion function with its declared envelope
/// constants. Immutable after construction; validation happens up front.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    kind: SpectrumKind,
    c1: f64,
    c2: Option<f64>,
    c3: Option<f64>,
    /// Grid-certified coherence: nonnegative, nondecreasing, unit mass.
    /// The CVaR indicator is coherent analytically but its jump defeats
    /// the trapezoid mass check, so it carries `false` here; the flag
    /// records what the constructor certified, not a mathematical claim.
    coherent: bool,
    /// Knots for `Custom`, ascending in β, covering [0,1] exactly.
    table: Vec<(f64, f64)>,
    /// Canonical spec string (`expk:5`, `cvar:0.95`, `custom:<path>`, …).
    label: String,
}

impl Spectrum {
    /// Exponential risk-aversion spectrum with aversion parameter `k`.
    pub fn exponential(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("risk aversion k must be > 0, got {k}")));
        }
        let c1 = k / (-f64::exp_m1(-k));
        let s = Self {
            kind: SpectrumKind::ExponentialRiskAversion { k },
            c1,
            c2: Some(k * c1),
            c3: Some(k * k * c1),
            coherent: true,
            table: Vec::new(),
            label: format!("expk:{k}"),
        };
        s.validate()?;
        Ok(s)
    }

    /// CVaR indicator spectrum at level `alpha`.
    pub fn cvar(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let s = Self {
            kind: SpectrumKind::CvarIndicator { alpha },
            c1: 1.0 / (1.0 - alpha),
            c2: None,
            c3: None,
            coherent: false,
            table: Vec::new(),
            label: format!("cvar:{alpha}"),
        };
        s.validate()?;
        Ok(s)
    }

    /// Piecewise-linear spectrum from explicit knots and declared
    /// constants. The table must start at β = 0, end at β = 1, and be
    /// strictly ascending in β.
    pub fn custom(
        table: Vec<(f64, f64)>,
        c1: f64,
        c2: Option<f64>,
        c3: Option<f64>,
        coherent: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::Config("custom spectrum needs at least two knots".into()));
        }
        if table[0].0 != 0.0 || table[table.len() - 1].0 != 1.0 {
            return Err(Error::Config(
                "custom spectrum table must cover [0,1]: first knot at 0, last at 1".into(),
            ));
        }
        for w in table.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::Config(format!(
                    "custom spectrum knots must be strictly ascending, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if table.iter().any(|&(b, v)| !b.is_finite() || !v.is_finite()) {
            return Err(Error::Config("custom spectrum table has non-finite entries".into()));
        }
        if !(c1 >= 0.0) {
            return Err(Error::Config(format!("C1 must be ≥ 0, got {c1}")));
        }
        let s = Self {
            kind: SpectrumKind::Custom,
            c1,
            c2,
            c3,
            coherent,
            table,
            label: label.into(),
        };
        s.validate()?;
        Ok(s)
    }

    /// The constant spectrum φ ≡ 1 (uniform weighting of all quantiles).
    /// Used wherever an unweighted quantile integral is needed, e.g. the
    /// CVaR bound constants; C1 = 1, C2 = C3 = 0 exactly.
    pub fn flat() -> Self {
        Self::custom(vec![(0.0, 1.0), (1.0, 1.0)], 1.0, Some(0.0), Some(0.0), true, "flat")
            .expect("the flat spectrum is statically valid")
    }

    /// Parse a CLI/config spec: `expk:5`, `cvar:0.95`, or `custom:<file>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("spectrum spec `{spec}`: {msg}"));
        let (kind, arg) = spec.split_once(':').ok_or_else(|| bad("expected `kind:arg`"))?;
        match kind.trim() {
            "expk" => {
                let k: f64 = arg.trim().parse().map_err(|e| bad(&format!("bad k: {e}")))?;
                Self::exponential(k).map_err(domain_to_config)
            }
            "cvar" => {
                let a: f64 = arg.trim().parse().map_err(|e| bad(&format!("bad alpha: {e}")))?;
                Self::cvar(a).map_err(domain_to_config)
            }
            "custom" => {
                let text = std::fs::read_to_string(arg.trim()).map_err(|e| {
                    Error::Config(format!("cannot read spectrum file `{}`: {e}", arg.trim()))
                })?;
                Self::from_table_text(&text, &format!("custom:{}", arg.trim()))
            }
            other => Err(bad(&format!("unknown spectrum kind `{other}`"))),
        }
    }

    /// Parse the plain-text custom-spectrum format: `c1`/`c2`/`c3`
    /// constant lines, an optional `coherent true`, and one `β φ` pair
    /// per line; `#` starts a comment.
    pub fn from_table_text(text: &str, label: &str) -> Result<Self> {
        let mut c1 = None;
        let mut c2 = None;
        let mut c3 = None;
        let mut coherent = false;
        let mut table = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Config(format!("spectrum file line {}: {msg}", ln + 1));
            let mut parts = line.split_whitespace();
            let (head, rest) = (parts.next().unwrap(), parts.collect::<Vec<_>>());
            let one_arg = |rest: &[&str]| -> Result<String> {
                if rest.len() != 1 {
                    return Err(bad(format!("`{head}` takes exactly one value")));
                }
                Ok(rest[0].to_string())
            };
            match head {
                "c1" => c1 = Some(parse_num(&one_arg(&rest)?).map_err(&bad)?),
                "c2" => c2 = Some(parse_num(&one_arg(&rest)?).map_err(&bad)?),
                "c3" => c3 = Some(parse_num(&one_arg(&rest)?).map_err(&bad)?),
                "coherent" => {
                    coherent = match one_arg(&rest)?.as_str() {
                        "true" => true,
                        "false" => false,
                        other => return Err(bad(format!("expected true/false, got `{other}`"))),
                    }
                }
                beta => {
                    if rest.len() != 1 {
                        return Err(bad("expected `beta value`".into()));
                    }
                    let b = parse_num(beta).map_err(&bad)?;
                    let v = parse_num(rest[0]).map_err(&bad)?;
                    table.push((b, v));
                }
            }
        }
        let c1 =
            c1.ok_or_else(|| Error::Config("spectrum file must declare c1 (sup |φ|)".into()))?;
        Self::custom(table, c1, c2, c3, coherent, label)
    }

    /// Evaluate φ(β). Total on [0,1]; callers keep β in range.
    pub fn eval(&self, beta: f64) -> f64 {
        match self.kind {
            SpectrumKind::ExponentialRiskAversion { k } => {
                k * (-k * (1.0 - beta)).exp() / (-f64::exp_m1(-k))
            }
            // Strict inequality: the indicator is 1{β > α}, so eval(α) = 0.
            SpectrumKind::CvarIndicator { alpha } => {
                if beta > alpha {
                    self.c1
                } else {
                    0.0
                }
            }
            SpectrumKind::Custom => self.interp(beta),
        }
    }

    fn interp(&self, beta: f64) -> f64 {
        let t = &self.table;
        if beta <= t[0].0 {
            return t[0].1;
        }
        if beta >= t[t.len() - 1].0 {
            return t[t.len() - 1].1;
        }
        // partition_point: first knot with β_knot > beta.
        let i = t.partition_point(|&(b, _)| b <= beta);
        let (b0, v0) = t[i - 1];
        let (b1, v1) = t[i];
        v0 + (v1 - v0) * (beta - b0) / (b1 - b0)
    }

    /// Sup |φ| envelope.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Sup |φ′| envelope, if declared.
    pub fn c2(&self) -> Option<f64> {
        self.c2
    }

    /// Sup |φ″| envelope, if declared.
    pub fn c3(&self) -> Option<f64> {
        self.c3
    }

    /// Whether the constructor grid-certified coherence.
    pub fn coherent(&self) -> bool {
        self.coherent
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    /// Canonical spec string.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Discontinuity / kink locations in (0,1), ascending — quadrature
    /// splits panels here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            SpectrumKind::ExponentialRiskAversion { .. } => Vec::new(),
            SpectrumKind::CvarIndicator { alpha } => vec![alpha],
            SpectrumKind::Custom => self
                .table
                .iter()
                .map(|&(b, _)| b)
                .filter(|&b| b > 0.0 && b < 1.0)
                .collect(),
        }
    }

    /// Grid checks behind every constructor: C1 dominance always, and the
    /// coherence triple (nonnegative, nondecreasing, unit trapezoid mass)
    /// when the flag is set.
    fn validate(&self) -> Result<()> {
        let slack = GRID_SLACK * self.c1.max(1.0);
        let mut prev = f64::NEG_INFINITY;
        let mut mass = 0.0;
        let mut prev_v = 0.0;
        for i in 0..=GRID {
            let beta = i as f64 / GRID as f64;
            let v = self.eval(beta);
            if v.abs() > self.c1 + slack {
                return Err(Error::Domain(format!(
                    "declared C1 = {} is below |φ({beta})| = {}",
                    self.c1,
                    v.abs()
                )));
            }
            if self.coherent {
                if v < -slack {
                    return Err(Error::Domain(format!(
                        "coherent spectrum must be nonnegative; φ({beta}) = {v}"
                    )));
                }
                if v < prev - slack {
                    return Err(Error::Domain(format!(
                        "coherent spectrum must be nondecreasing; φ decreases at β = {beta}"
                    )));
                }
            }
            if i > 0 {
                mass += 0.5 * (prev_v + v) / GRID as f64;
            }
            prev = prev.max(v);
            prev_v = v;
        }
        if self.coherent && (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Domain(format!(
                "coherent spectrum must integrate to 1; trapezoid mass on the grid is {mass}"
            )));
        }
        Ok(())
    }
}

fn parse_num(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"))
}

fn domain_to_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::Config(msg),
        e => e,
    }
}
