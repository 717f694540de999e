//! Adaptive Simpson quadrature with breakpoint splitting.
//!
//! Backs the analytic SRM/CVaR oracles in [`crate::dist`]. The integrands
//! there are φ(β)·V_β on subsets of (0,1): smooth within a panel but
//! possibly discontinuous at declared spectrum breakpoints (the CVaR
//! indicator jumps at α) and singular at the endpoints for unbounded
//! laws — endpoint handling lives with the caller, which feeds this
//! routine only closed intervals in the interior.

use crate::{Error, Result};

/// Hard cap on recursion depth; 2⁴⁸ panel halvings is far beyond any
/// tolerance representable in f64, so hitting this means the integrand
/// is pathological (e.g. an undeclared jump).
const MAX_DEPTH: u32 = 48;

/// Relative inset for endpoint evaluations next to a breakpoint cut. At a
/// jump the function value *at* the cut belongs to neither side, so each
/// adjacent panel samples a hair inside instead; the induced integral
/// error is O(|f′|·inset·width), far below any practical tolerance.
const CUT_INSET: f64 = 1e-12;

/// Integrate `f` over `[a, b]` to absolute accuracy ≈ `tol`, splitting
/// first at the ascending `breakpoints` that fall strictly inside `[a, b]`.
///
/// Standard adaptive Simpson: a panel is accepted when the Richardson
/// estimate |S₂ − S₁|/15 is below its share of the tolerance, and the
/// refined value S₂ + (S₂ − S₁)/15 is used.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    breakpoints: &[f64],
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("bad integration interval [{a}, {b}]")));
    }
    if tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }

    // Carve [a, b] at interior breakpoints so each piece is smooth.
    let mut cuts = vec![a];
    for &p in breakpoints {
        if p > a && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);

    let mut total = 0.0;
    for (i, w) in cuts.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let inset = (hi - lo) * CUT_INSET;
        // Sample endpoints strictly inside the panel when they sit on a
        // cut, so one-sided limits are used on either side of a jump.
        let fa = if i == 0 { f(lo) } else { f(lo + inset) };
        let fb = if i == cuts.len() - 2 { f(hi) } else { f(hi - inset) };
        let share = tol * (hi - lo) / (b - a);
        total += panel(f, lo, hi, fa, fb, share.max(f64::MIN_POSITIVE))?;
    }
    Ok(total)
}

/// Adaptive Simpson on one smooth panel with endpoint values supplied.
fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;

    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical {
            what: format!("adaptive quadrature stalled on [{a}, {b}]"),
            achieved: delta.abs() / 15.0,
            requested: tol,
        });
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}
