//! Adaptive Simpson quadrature.

/// Absolute tolerance used for every quadrature in the crate.
pub const QUAD_TOL: f64 = 1e-10;
/// Maximum recursion depth for the adaptive refinement.
pub const QUAD_MAX_DEPTH: u32 = 40;
/// Levels always subdivided, so a kink cannot fool the first error estimate.
const MIN_LEVELS: u32 = 5;

/// Integrates `f` over `[a, b]` with absolute tolerance `tol`.
///
/// Uses the classic Richardson-corrected adaptive Simpson rule. Returns 0 for
/// an empty or reversed interval.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    if !(b > a) {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth, MIN_LEVELS)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32, min: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (min == 0 && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    let min = min.saturating_sub(1);
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, min)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, min)
}

/// [`adaptive_simpson`] with the crate defaults.
pub fn integrate<F>(f: F, a: f64, b: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    adaptive_simpson(f, a, b, QUAD_TOL, QUAD_MAX_DEPTH)
}
