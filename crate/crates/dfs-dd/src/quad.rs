//! Adaptive Simpson quadrature.
//!
//! The decoherence integrals in [`crate::filter`] integrate a smooth
//! spectral density against a rapidly oscillating filter function. The
//! caller splits the axis into panels of roughly half an oscillation period
//! and integrates each panel with the adaptive rule below, so the local
//! error control never has to straddle many oscillations.

/// Integrates `f` over `[a, b]` by adaptive Simpson subdivision.
///
/// An interval is accepted once the standard Simpson error estimate drops
/// below `rel_tol` relative to the local value, or below `abs_floor`
/// absolutely (which keeps near-zero integrals from forcing unbounded
/// refinement). Recursion is capped at depth 60, by which point interval
/// widths are at the resolution limit of `f64` for any practical panel.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> f64 {
    assert!(a.is_finite() && b.is_finite() && b >= a);
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, rel_tol, abs_floor, 60)
}

/// Like [`adaptive_simpson`], but forces an initial split of `[a, b]` into
/// `chunks` equal pieces before adapting inside each.
///
/// Pure adaptivity only refines where the coarse samples already disagree,
/// so a feature much narrower than the interval (a sharp spectral peak
/// inside one oscillation panel) can be missed entirely when every initial
/// sample lands outside it. The forced subdivision bounds the blind spot to
/// the chunk width.
pub fn adaptive_simpson_chunked<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    chunks: usize,
) -> f64 {
    assert!(chunks >= 1);
    let width = (b - a) / chunks as f64;
    (0..chunks)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == chunks { b } else { lo + width };
            adaptive_simpson(f, lo, hi, rel_tol, abs_floor / chunks as f64)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let tol = (rel_tol * (left + right).abs()).max(abs_floor);
    if depth == 0 || delta.abs() <= 15.0 * tol {
        // Richardson extrapolation of the accepted pair.
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_floor, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_floor, depth - 1)
}
