//! Newton solver for switching-time moment constraints.
//!
//! An order-`n` sequence over `d` distinct Hamiltonian types must make each
//! type's generalized duration `∫ 1[σ(s) = c] · s^p ds` equal across types
//! for `p = 0…n−1`. Taking consecutive differences in the order the types
//! first appear yields `(d−1)·n` polynomial equations in the `N−1` interior
//! switching times — a square system for both sequence families here, solved
//! by a damped Newton iteration with an analytic Jacobian.
//!
//! Internally the polynomial test functions are the shifted Legendre
//! polynomials `P_p(2s−1)` rather than the monomials `s^p`: they span the
//! same space, so the constraint set is identical, but the monomial Jacobian
//! is a quasi-Vandermonde matrix whose conditioning collapses long before
//! order 64, while the orthogonal basis keeps every row bounded. Interval
//! integrals use the exact antiderivative
//! `∫ P_p = (P_{p+1} − P_{p−1}) / (2(2p+1))`.
//!
//! The residuals are smooth but the system has many spurious or non-monotone
//! roots, so convergence depends on seeding. The seeds exploit the empirical
//! layout of the solutions:
//!
//! * cyclic-group family: each uniform-axis time `u_j` is bracketed by one
//!   pair of switching times, so pairs are seeded at `u_j ∓ δ_j` with `δ_j`
//!   a fraction of the local gap;
//! * full-group family: each uniform-axis time contributes a five-time block
//!   `(★⁻, a⁻, u, a⁺, ★⁺)` whose inner pair are the cyclic-group times and
//!   whose outer pair mirrors the inner gap outward, so the seed is the
//!   sorted union of the solved cyclic times, the uniform-axis times, and
//!   extrapolated outer times.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::sequence::{a3_hamiltonians, s3_hamiltonians, udd_times, HamiltonianType};

/// Target threshold on the max-norm of the residual vector: polish until
/// here when possible.
const TARGET_TOL: f64 = 1e-15;
/// A stalled iterate below this residual still counts as converged (the
/// line search has hit the rounding floor).
const ACCEPT_TOL: f64 = 1e-13;
/// Iteration cap for the Newton loop.
const MAX_ITERATIONS: u32 = 200;
/// Smallest damping factor tried before declaring a stall.
const MIN_DAMPING: f64 = 1e-8;

/// Failures of the switching-time solver.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("constraint system is singular at the current iterate (underdetermined)")]
    Underdetermined,
    #[error("Newton iteration did not converge (residual {residual_norm:.3e} after {iterations} iterations)")]
    NonConvergent { residual_norm: f64, iterations: u32 },
    #[error("iterate left the ordered region 0 < t_1 < … < 1")]
    NonMonotone,
    #[error("bad solver input: {0}")]
    BadInput(String),
}

/// Values of the shifted Legendre polynomials `P_0…P_max` at `s ∈ [0, 1]`
/// (standard three-term recurrence in `x = 2s − 1`).
fn shifted_legendre(max: usize, s: f64) -> Vec<f64> {
    let x = 2.0 * s - 1.0;
    let mut v = Vec::with_capacity(max + 1);
    v.push(1.0);
    if max >= 1 {
        v.push(x);
    }
    for p in 1..max {
        let next = ((2 * p + 1) as f64 * x * v[p] - p as f64 * v[p - 1]) / (p + 1) as f64;
        v.push(next);
    }
    v
}

/// Antiderivatives `A_p(s) = ∫₀^s P_p(2u−1) du` for `p = 0…max`.
fn shifted_legendre_antiderivatives(max: usize, s: f64) -> Vec<f64> {
    let v = shifted_legendre(max + 1, s);
    let mut a = Vec::with_capacity(max + 1);
    a.push(s);
    for p in 1..=max {
        a.push((v[p + 1] - v[p - 1]) / (2.0 * (2 * p + 1) as f64));
    }
    a
}

/// Indicator-difference weights for the distinct types of a schedule, in
/// order of first appearance. Row `i` assigns `+1` to intervals of type
/// `c_i`, `−1` to type `c_{i+1}`, `0` otherwise.
fn constraint_weights(hamiltonians: &[HamiltonianType]) -> Vec<Vec<f64>> {
    let mut distinct: Vec<HamiltonianType> = Vec::new();
    for &h in hamiltonians {
        if !distinct.contains(&h) {
            distinct.push(h);
        }
    }
    distinct
        .windows(2)
        .map(|pair| {
            hamiltonians
                .iter()
                .map(|&h| {
                    if h == pair[0] {
                        1.0
                    } else if h == pair[1] {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn is_strictly_ordered(times: &[f64]) -> bool {
    let mut prev = 0.0;
    for &t in times {
        if !(t > prev && t < 1.0) {
            return false;
        }
        prev = t;
    }
    true
}

/// Residual vector in the orthogonal test basis: for each weight row `w`
/// and `p = 0…n−1`, `Σ_k w_k (A_p(t_k) − A_p(t_{k−1}))` with `t_0 = 0`,
/// `t_N = 1`.
fn residual_vector(weights: &[Vec<f64>], times: &[f64], n: u32) -> DVector<f64> {
    let max_p = n as usize - 1;
    let mut anti = Vec::with_capacity(times.len() + 2);
    anti.push(shifted_legendre_antiderivatives(max_p, 0.0));
    for &t in times {
        anti.push(shifted_legendre_antiderivatives(max_p, t));
    }
    anti.push(shifted_legendre_antiderivatives(max_p, 1.0));
    let mut out = DVector::zeros(weights.len() * n as usize);
    let mut row = 0;
    for w in weights {
        for p in 0..=max_p {
            let mut acc = 0.0;
            for (k, &wk) in w.iter().enumerate() {
                if wk != 0.0 {
                    acc += wk * (anti[k + 1][p] - anti[k][p]);
                }
            }
            out[row] = acc;
            row += 1;
        }
    }
    out
}

/// Analytic Jacobian: `∂R_{i,p}/∂t_k = (w_{i,k} − w_{i,k+1}) P_p(2t_k − 1)`.
fn jacobian(weights: &[Vec<f64>], times: &[f64], n: u32) -> DMatrix<f64> {
    let max_p = n as usize - 1;
    let values: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| shifted_legendre(max_p, t))
        .collect();
    let rows = weights.len() * n as usize;
    let mut jac = DMatrix::zeros(rows, times.len());
    let mut row = 0;
    for w in weights {
        for p in 0..=max_p {
            for k in 0..times.len() {
                jac[(row, k)] = (w[k] - w[k + 1]) * values[k][p];
            }
            row += 1;
        }
    }
    jac
}

/// Solves the order-`n` moment constraints of a type schedule for its
/// interior switching times, starting from `guess`.
///
/// The system must be square (`(d−1)·n` constraints for `N−1` unknowns with
/// `d` distinct types over `N` intervals) and the guess strictly ordered in
/// `(0, 1)`. Returns the ordered solution times; iterates that leave the
/// ordered region are rejected by the damped line search.
pub fn solve_times(
    hamiltonians: &[HamiltonianType],
    n: u32,
    guess: &[f64],
) -> Result<Vec<f64>, SolveError> {
    if hamiltonians.len() < 2 {
        return Err(SolveError::BadInput(
            "schedule needs at least two intervals".into(),
        ));
    }
    if n == 0 {
        return Err(SolveError::BadInput(
            "decoupling order must be at least 1".into(),
        ));
    }
    if guess.len() + 1 != hamiltonians.len() {
        return Err(SolveError::BadInput(format!(
            "{} intervals need {} interior times, got {}",
            hamiltonians.len(),
            hamiltonians.len() - 1,
            guess.len()
        )));
    }
    let weights = constraint_weights(hamiltonians);
    let equations = weights.len() * n as usize;
    if equations != guess.len() {
        return Err(SolveError::BadInput(format!(
            "system is not square: {} equations for {} unknowns",
            equations,
            guess.len()
        )));
    }
    if !is_strictly_ordered(guess) {
        return Err(SolveError::NonMonotone);
    }

    let mut times = guess.to_vec();
    let mut residual = residual_vector(&weights, &times, n);
    let mut norm = residual.amax();
    for iteration in 0..MAX_ITERATIONS {
        if norm < TARGET_TOL {
            return Ok(times);
        }
        let jac = jacobian(&weights, &times, n);
        let step = jac
            .lu()
            .solve(&(-&residual))
            .ok_or(SolveError::Underdetermined)?;
        // Keep steps short enough that no boundary ordering can flip at
        // full length, then damp until the residual actually shrinks.
        let min_gap = {
            let mut gap = times[0].min(1.0 - times[times.len() - 1]);
            for pair in times.windows(2) {
                gap = gap.min(pair[1] - pair[0]);
            }
            gap
        };
        let cap = if step.amax() > 0.45 * min_gap {
            0.45 * min_gap / step.amax()
        } else {
            1.0
        };
        let mut damping = cap;
        let stalled = loop {
            let candidate: Vec<f64> = times
                .iter()
                .zip(step.iter())
                .map(|(t, s)| t + damping * s)
                .collect();
            if is_strictly_ordered(&candidate) {
                let cand_residual = residual_vector(&weights, &candidate, n);
                let cand_norm = cand_residual.amax();
                if cand_norm < norm {
                    times = candidate;
                    residual = cand_residual;
                    norm = cand_norm;
                    break false;
                }
            }
            damping *= 0.5;
            if damping < MIN_DAMPING {
                break true;
            }
        };
        if stalled {
            // Rounding floor: accept if already within tolerance.
            if norm < ACCEPT_TOL {
                return Ok(times);
            }
            return Err(SolveError::NonConvergent {
                residual_norm: norm,
                iterations: iteration,
            });
        }
    }
    if norm < ACCEPT_TOL {
        return Ok(times);
    }
    Err(SolveError::NonConvergent {
        residual_norm: norm,
        iterations: MAX_ITERATIONS,
    })
}

/// Maximum absolute moment residual of a candidate solution in the
/// orthogonal test basis (available to callers for verification).
pub fn constraint_residual_norm(hamiltonians: &[HamiltonianType], times: &[f64], n: u32) -> f64 {
    residual_vector(&constraint_weights(hamiltonians), times, n).amax()
}

/// Seeds the cyclic-group system: the pair of times around each
/// uniform-axis time `u_j`, offset by `fraction` of the local gap.
fn bracket_seed(n: u32, fraction: f64) -> Vec<f64> {
    let u = udd_times(n);
    let mut seed = Vec::with_capacity(2 * n as usize);
    for j in 0..n as usize {
        let below = if j == 0 { 0.0 } else { u[j - 1] };
        let above = if j + 1 == n as usize { 1.0 } else { u[j + 1] };
        let delta = fraction * (u[j] - below).min(above - u[j]);
        seed.push(u[j] - delta);
        seed.push(u[j] + delta);
    }
    seed
}

/// Solves the order-`n` cyclic-group switching times from scratch.
pub fn solve_a3_times(n: u32) -> Result<Vec<f64>, SolveError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let hamiltonians = a3_hamiltonians(n);
    let mut last = SolveError::NonConvergent {
        residual_norm: f64::INFINITY,
        iterations: 0,
    };
    for fraction in [0.30, 0.22, 0.38, 0.15, 0.45] {
        match solve_times(&hamiltonians, n, &bracket_seed(n, fraction)) {
            Ok(times) => return Ok(times),
            Err(err) => last = err,
        }
    }
    Err(last)
}

/// Seeds the full-group system: sorted union of the solved cyclic-group
/// times, the uniform-axis times, and outer times extrapolated by `factor`
/// times the inner bracket half-width.
fn star_seed(n: u32, a3: &[f64], factor: f64) -> Vec<f64> {
    let u = udd_times(n);
    let mut seed = Vec::with_capacity(5 * n as usize);
    for j in 0..n as usize {
        let inner_lo = a3[2 * j];
        let inner_hi = a3[2 * j + 1];
        let below = if j == 0 { 0.0 } else { u[j - 1] };
        let above = if j + 1 == n as usize { 1.0 } else { u[j + 1] };
        let outer_lo = (u[j] - factor * (u[j] - inner_lo)).max(0.5 * (below + inner_lo));
        let outer_hi = (u[j] + factor * (inner_hi - u[j])).min(0.5 * (above + inner_hi));
        seed.extend_from_slice(&[outer_lo, inner_lo, u[j], inner_hi, outer_hi]);
    }
    seed
}

/// Solves the order-`n` full-group switching times from scratch (the
/// cyclic-group subproblem is solved first to build the seed).
pub fn solve_s3_times(n: u32) -> Result<Vec<f64>, SolveError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let a3 = crate::sequence::a3_times(n)?;
    let hamiltonians = s3_hamiltonians(n);
    let mut last = SolveError::NonConvergent {
        residual_norm: f64::INFINITY,
        iterations: 0,
    };
    for factor in [2.0, 1.8, 2.2, 1.5, 2.5] {
        match solve_times(&hamiltonians, n, &star_seed(n, &a3, factor)) {
            Ok(times) => return Ok(times),
            Err(err) => last = err,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_antiderivatives_vanish_at_both_ends() {
        let at_zero = shifted_legendre_antiderivatives(6, 0.0);
        let at_one = shifted_legendre_antiderivatives(6, 1.0);
        for p in 1..=6 {
            assert_abs_diff_eq!(at_zero[p], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(at_one[p], 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(at_one[0], 1.0, epsilon = 1e-15);
        // Spot value: ∫₀^s P_1(2u−1) du = s² − s at s = 0.3.
        let a = shifted_legendre_antiderivatives(1, 0.3);
        assert_abs_diff_eq!(a[1], 0.3f64.powi(2) - 0.3, epsilon = 1e-15);
    }

    #[test]
    fn first_order_cyclic_solution_from_coarse_guess() {
        let times = solve_times(&a3_hamiltonians(1), 1, &[0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(times[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(times[1], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn solver_reproduces_stored_cyclic_times() {
        for n in 1..=10 {
            let solved = solve_a3_times(n).unwrap();
            let stored = sequence::a3_times(n).unwrap();
            for (s, r) in solved.iter().zip(&stored) {
                assert_abs_diff_eq!(s, r, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn solver_reproduces_stored_full_group_times() {
        for n in 1..=10 {
            let solved = solve_s3_times(n).unwrap();
            let stored = sequence::s3_times(n).unwrap();
            for (s, r) in solved.iter().zip(&stored) {
                assert_abs_diff_eq!(s, r, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn high_order_solutions_satisfy_constraints() {
        for n in [12, 20, 32] {
            let times = solve_a3_times(n).unwrap();
            assert_eq!(times.len(), 2 * n as usize);
            let res = constraint_residual_norm(&a3_hamiltonians(n), &times, n);
            assert!(res < 1e-12, "order {n} residual {res:.3e}");
        }
        let times = solve_s3_times(12).unwrap();
        assert_eq!(times.len(), 60);
        assert!(constraint_residual_norm(&s3_hamiltonians(12), &times, 12) < 1e-12);
    }

    #[test]
    fn order_sixty_four_cyclic_times_solve() {
        let times = solve_a3_times(64).unwrap();
        assert_eq!(times.len(), 128);
        let res = constraint_residual_norm(&a3_hamiltonians(64), &times, 64);
        assert!(res < 1e-12, "residual {res:.3e}");
        // Solutions keep the bracketing layout.
        let u = udd_times(64);
        for (j, uj) in u.iter().enumerate() {
            assert!(times[2 * j] < *uj && *uj < times[2 * j + 1]);
        }
    }

    #[test]
    fn non_square_systems_are_rejected() {
        let err = solve_times(&a3_hamiltonians(2), 1, &[0.2, 0.4, 0.6, 0.8]).unwrap_err();
        assert!(matches!(err, SolveError::BadInput(_)));
    }

    #[test]
    fn disordered_guess_is_rejected() {
        let err = solve_times(&a3_hamiltonians(1), 1, &[0.7, 0.3]).unwrap_err();
        assert!(matches!(err, SolveError::NonMonotone));
    }
}
