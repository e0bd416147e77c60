//! Ordinary least-squares line fits.
//!
//! Scaling exponents throughout the crate — filter-function slopes and
//! infidelity-vs-time power laws — are extracted as the slope of a straight
//! line through log-log data.

/// Result of a straight-line fit `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 for a perfect fit.
    pub r2: f64,
}

/// Least-squares straight line through `(x, y)` pairs.
///
/// # Panics
/// If the slices differ in length, contain fewer than two points, or all
/// `x` values coincide.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len(), "coordinate slices must match");
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    assert!(sxx > 0.0, "x values must not all coincide");
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LineFit { slope, intercept, r2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|&v| -2.5 * v + 0.75).collect();
        let fit = linear_fit(&x, &y);
        assert_abs_diff_eq!(fit.slope, -2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.intercept, 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.r2, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn noise_reduces_r2_but_tracks_slope() {
        // Deterministic +/- perturbation around a known line.
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| 3.0 * v + 1.0 + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let fit = linear_fit(&x, &y);
        assert_abs_diff_eq!(fit.slope, 3.0, epsilon = 1e-3);
        assert!(fit.r2 > 0.999);
    }
}
