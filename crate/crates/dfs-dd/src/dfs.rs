//! The 3-qubit decoherence-free subsystem: basis, projector, and fidelity.
//!
//! Three physical qubits carry one encoded qubit in the total-spin sectors
//! that collective dephasing cannot distinguish. The eight basis states used
//! here split into a *valid* block (states 1–4: encoded qubit ⊗ gauge qubit)
//! and a *leaked* block (states 5–8). Everything downstream — filter-function
//! weights, simulator fidelities, search verdicts — is expressed through this
//! fixed basis and the projector onto its valid block.
//!
//! The encoded-subsystem fidelity of a propagator traces out the gauge
//! degree of freedom: starting from `|ψ_e⟩ ⊗ |ψ_g⟩` it measures how much of
//! the final state still lies along `|ψ_e⟩` regardless of where the gauge
//! ended up. For propagators that are diagonal in the computational basis
//! (pure dephasing), the fidelity collapses to a closed form
//!
//! ```text
//! F = c0 + c1·cos 2(θ3−θ1) + c2·cos 2(θ2−θ3) + c3·cos 2(θ1−θ2)
//! ```
//!
//! with state-dependent weights `c0..c3` returned by
//! [`fidelity_coefficients`]; the weights sum to one for every encoded state.
//! The pairing of weights to phase differences follows from expanding the
//! projected propagator in this basis: writing `s = √(1−r²)`, the valid-block
//! overlap is `|β1·e^{2iθ1} + β2·e^{2iθ2} + β3·e^{2iθ3}|²` with
//! `β1,2 = r²/2 ± r·s·cosφ/√3 + s²/6` and `β3 = 2s²/3`, so the `+cosφ`
//! weight `c1 = 2β1β3` multiplies `cos 2(θ3−θ1)`. The unit test
//! `diagonal_propagators_match_closed_form` pins this pairing against the
//! full matrix evaluation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Maximum allowed deviation of `U†U` from the identity in
/// [`encoded_fidelity`].
pub const UNITARITY_TOL: f64 = 1e-12;

/// Errors from fidelity evaluation.
#[derive(Debug, Error)]
pub enum DfsError {
    /// The supplied propagator is not unitary to [`UNITARITY_TOL`].
    #[error("propagator is not unitary: max |U†U - I| = {max_deviation:.3e}")]
    NonUnitary { max_deviation: f64 },
}

/// The eight-state basis adapted to the decoherence-free subsystem.
///
/// Row `k` (0-based) holds basis state `k+1` expressed in the computational
/// basis `|000⟩..|111⟩` (qubit 1 most significant). States 1–4 are the valid
/// block, ordered so state `1 + 2e + g` carries encoded bit `e` and gauge
/// bit `g`; states 5–8 are the leaked block.
#[derive(Clone, Debug)]
pub struct DfsBasis {
    rows: DMatrix<f64>,
}

impl DfsBasis {
    /// The 8x8 change-of-basis matrix; row `k` is basis state `k+1`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Basis state `k` (1-based) as a computational-basis vector.
    pub fn state(&self, k: usize) -> DVector<f64> {
        assert!((1..=8).contains(&k), "basis states are numbered 1..=8");
        self.rows.row(k - 1).transpose()
    }

    /// Index (1-based) of the valid state with encoded bit `e` and gauge
    /// bit `g`.
    pub fn valid_index(e: usize, g: usize) -> usize {
        debug_assert!(e < 2 && g < 2);
        1 + 2 * e + g
    }
}

/// Projector onto the valid (decoherence-free) block.
#[derive(Clone, Debug)]
pub struct ValidProjector {
    matrix: DMatrix<f64>,
}

impl ValidProjector {
    /// The 8x8 projector matrix in the computational basis.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// An encoded-plus-gauge initial state.
///
/// The encoded qubit is `(r, √(1−r²)·e^{iφ})`; the gauge qubit is an
/// arbitrary 2-component unit vector (default `(1, 0)`).
#[derive(Clone, Debug)]
pub struct DfsState {
    r: f64,
    phi: f64,
    gauge: [Complex64; 2],
}

impl DfsState {
    /// Creates a state with encoded amplitudes `(r, √(1−r²)·e^{iφ})` and the
    /// default gauge `(1, 0)`.
    ///
    /// # Panics
    /// If `r` lies outside `[0, 1]`.
    pub fn new(r: f64, phi: f64) -> DfsState {
        assert!((0.0..=1.0).contains(&r), "encoded amplitude r must be in [0,1]");
        DfsState {
            r,
            phi,
            gauge: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    /// Replaces the gauge vector (normalized internally).
    ///
    /// # Panics
    /// If `gauge` is the zero vector.
    pub fn with_gauge(mut self, gauge: [Complex64; 2]) -> DfsState {
        let norm = (gauge[0].norm_sqr() + gauge[1].norm_sqr()).sqrt();
        assert!(norm > 0.0, "gauge vector must be nonzero");
        self.gauge = [gauge[0] / norm, gauge[1] / norm];
        self
    }

    /// Encoded amplitude magnitude `r`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Encoded relative phase `φ`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Encoded amplitudes `(ψ_e[0], ψ_e[1])`.
    pub fn encoded(&self) -> [Complex64; 2] {
        let s = (1.0 - self.r * self.r).max(0.0).sqrt();
        [
            Complex64::new(self.r, 0.0),
            Complex64::from_polar(s, self.phi),
        ]
    }

    /// Gauge amplitudes `(ψ_g[0], ψ_g[1])`.
    pub fn gauge(&self) -> [Complex64; 2] {
        self.gauge
    }
}

/// Returns the eight-state basis.
pub fn dfs_basis() -> DfsBasis {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3.0_f64.sqrt();
    let s6 = 1.0 / 6.0_f64.sqrt();
    let s23 = (2.0 / 3.0_f64).sqrt();
    let mut rows = DMatrix::zeros(8, 8);
    // Valid block: encoded 0 with the two gauge settings, then encoded 1.
    rows[(0, 0b010)] = s2;
    rows[(0, 0b100)] = -s2;
    rows[(1, 0b011)] = s2;
    rows[(1, 0b101)] = -s2;
    rows[(2, 0b001)] = s23;
    rows[(2, 0b010)] = -s6;
    rows[(2, 0b100)] = -s6;
    rows[(3, 0b011)] = s6;
    rows[(3, 0b101)] = s6;
    rows[(3, 0b110)] = -s23;
    // Leaked block: the fully symmetric states.
    rows[(4, 0b000)] = 1.0;
    rows[(5, 0b001)] = s3;
    rows[(5, 0b010)] = s3;
    rows[(5, 0b100)] = s3;
    rows[(6, 0b011)] = s3;
    rows[(6, 0b101)] = s3;
    rows[(6, 0b110)] = s3;
    rows[(7, 0b111)] = 1.0;
    DfsBasis { rows }
}

/// Returns the projector onto the valid block, `Σ_{k=1..4} |k⟩⟨k|`.
pub fn projector_valid() -> ValidProjector {
    let basis = dfs_basis();
    let mut matrix = DMatrix::zeros(8, 8);
    for k in 1..=4 {
        let v = basis.state(k);
        matrix += &v * v.transpose();
    }
    ValidProjector { matrix }
}

/// Weights of the closed-form dephasing fidelity for the encoded state
/// `(r, √(1−r²)·e^{iφ})`, averaged over the gauge.
///
/// The four weights sum to one for every admissible `(r, φ)`.
///
/// # Panics
/// If `r` lies outside `[0, 1]`.
pub fn fidelity_coefficients(r: f64, phi: f64) -> [f64; 4] {
    assert!((0.0..=1.0).contains(&r), "encoded amplitude r must be in [0,1]");
    let r2 = r * r;
    let r4 = r2 * r2;
    let cos_phi = phi.cos();
    let cos_2phi = (2.0 * phi).cos();
    let cross = 2.0 * r * (3.0 * (1.0 - r2)).max(0.0).sqrt() * cos_phi;
    let c0 = (3.0 - 2.0 * r2 + 2.0 * r4 + 2.0 * r2 * (1.0 - r2) * cos_2phi) / 6.0;
    let c1 = 2.0 / 9.0 * (1.0 - r2) * (1.0 + 2.0 * r2 + cross);
    let c2 = 2.0 / 9.0 * (1.0 - r2) * (1.0 + 2.0 * r2 - cross);
    let c3 = (1.0 - 2.0 * r2 + 10.0 * r4 - 6.0 * r2 * (1.0 - r2) * cos_2phi) / 18.0;
    [c0, c1, c2, c3]
}

/// Closed-form dephasing fidelity from per-qubit phases `θ = [θ1, θ2, θ3]`
/// of the propagator `exp(−i Σ_j θ_j Z_j)`.
pub fn fidelity_from_phases(coeffs: &[f64; 4], theta: [f64; 3]) -> f64 {
    coeffs[0]
        + coeffs[1] * (2.0 * (theta[2] - theta[0])).cos()
        + coeffs[2] * (2.0 * (theta[1] - theta[2])).cos()
        + coeffs[3] * (2.0 * (theta[0] - theta[1])).cos()
}

/// The 8x8 diagonal propagator `exp(−i Σ_j θ_j Z_j)` in the computational
/// basis (qubit 1 most significant).
pub fn diagonal_z_propagator(theta: [f64; 3]) -> DMatrix<Complex64> {
    let mut u = DMatrix::zeros(8, 8);
    for b in 0..8usize {
        let mut phase = 0.0;
        for (j, th) in theta.iter().enumerate() {
            let bit = (b >> (2 - j)) & 1;
            phase += th * (1.0 - 2.0 * bit as f64);
        }
        u[(b, b)] = Complex64::from_polar(1.0, -phase);
    }
    u
}

/// Encoded-subsystem fidelity of an 8x8 propagator.
///
/// Starting from `|ψ_e⟩ ⊗ |ψ_g⟩` inside the valid block, applies `U`,
/// projects back onto the valid block, and sums `|⟨ψ_e, μ|·⟩|²` over the two
/// gauge basis states `μ` — i.e. the gauge subsystem is traced out.
///
/// # Errors
/// [`DfsError::NonUnitary`] if `max |U†U − I| > 1e-12`.
pub fn encoded_fidelity(u: &DMatrix<Complex64>, state: &DfsState) -> Result<f64, DfsError> {
    assert_eq!((u.nrows(), u.ncols()), (8, 8), "propagator must be 8x8");
    let gram = u.adjoint() * u;
    let mut max_deviation = 0.0_f64;
    for r in 0..8 {
        for c in 0..8 {
            let expect = if r == c { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((gram[(r, c)] - expect).norm());
        }
    }
    if max_deviation > UNITARITY_TOL {
        return Err(DfsError::NonUnitary { max_deviation });
    }

    let basis = dfs_basis();
    let psi_e = state.encoded();
    let psi_g = state.gauge();

    // Initial state in the computational basis.
    let mut initial: DVector<Complex64> = DVector::zeros(8);
    for e in 0..2 {
        for g in 0..2 {
            let k = DfsBasis::valid_index(e, g);
            let weight = psi_e[e] * psi_g[g];
            initial += basis.state(k).map(|x| weight * x);
        }
    }

    let evolved = u * initial;

    // Valid-block amplitudes of the evolved state, indexed by (e, g).
    let mut amp = [[Complex64::new(0.0, 0.0); 2]; 2];
    for e in 0..2 {
        for g in 0..2 {
            let k = DfsBasis::valid_index(e, g);
            let row = basis.state(k);
            let mut a = Complex64::new(0.0, 0.0);
            for i in 0..8 {
                a += row[i] * evolved[i];
            }
            amp[e][g] = a;
        }
    }

    // Overlap with |ψ_e⟩ for each gauge outcome, gauge traced out.
    let mut fidelity = 0.0;
    for g in 0..2 {
        let overlap = psi_e[0].conj() * amp[0][g] + psi_e[1].conj() * amp[1][g];
        fidelity += overlap.norm_sqr();
    }
    Ok(fidelity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_rows_are_orthonormal() {
        let basis = dfs_basis();
        let gram = basis.matrix() * basis.matrix().transpose();
        for r in 0..8 {
            for c in 0..8 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(r, c)], expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn basis_amplitudes_match_construction() {
        let basis = dfs_basis();
        // ⟨010|1⟩ = +1/√2 and ⟨110|4⟩ = −√(2/3).
        assert_abs_diff_eq!(basis.state(1)[0b010], 0.5_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            basis.state(4)[0b110],
            -(2.0 / 3.0_f64).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn projector_is_idempotent_rank_four() {
        let proj = projector_valid();
        let p = proj.matrix();
        let p2 = p * p;
        for r in 0..8 {
            for c in 0..8 {
                assert_abs_diff_eq!(p2[(r, c)], p[(r, c)], epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(p.trace(), 4.0, epsilon = 1e-14);
        // |000⟩ lies entirely in the leaked block.
        let e0 = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert!((p * e0).norm() < 1e-15);
    }

    #[test]
    fn coefficient_endpoints_match_closed_forms() {
        let c = fidelity_coefficients(1.0, 0.0);
        assert_abs_diff_eq!(c[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[3], 0.5, epsilon = 1e-15);

        let c = fidelity_coefficients(0.0, 0.0);
        assert_abs_diff_eq!(c[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], 2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[2], 2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[3], 1.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn coefficients_sum_to_one() {
        for i in 0..25 {
            for j in 0..25 {
                let r = i as f64 / 24.0;
                let phi = j as f64 / 24.0 * std::f64::consts::TAU;
                let c = fidelity_coefficients(r, phi);
                assert_abs_diff_eq!(c.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identity_propagator_gives_unit_fidelity() {
        let u = DMatrix::from_diagonal_element(8, 8, Complex64::new(1.0, 0.0));
        let state = DfsState::new(0.3, 1.1);
        assert_abs_diff_eq!(encoded_fidelity(&u, &state).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn collective_phase_leaves_encoded_qubit_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let theta: f64 = rng.random_range(-3.0..3.0);
            let u = diagonal_z_propagator([theta, theta, theta]);
            let state = DfsState::new(rng.random_range(0.0..1.0), rng.random_range(0.0..6.28));
            assert_abs_diff_eq!(encoded_fidelity(&u, &state).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn opposite_phases_give_half_plus_half_cos() {
        for i in 0..40 {
            let theta = -2.0 + 0.1 * i as f64;
            let u = diagonal_z_propagator([theta, -theta, 0.0]);
            let state = DfsState::new(1.0, 0.0);
            let f = encoded_fidelity(&u, &state).unwrap();
            assert_abs_diff_eq!(f, 0.5 + 0.5 * (4.0 * theta).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_propagators_match_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let theta = [
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
            ];
            let r = rng.random_range(0.0..1.0);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let u = diagonal_z_propagator(theta);
            let f = encoded_fidelity(&u, &DfsState::new(r, phi)).unwrap();
            let closed = fidelity_from_phases(&fidelity_coefficients(r, phi), theta);
            assert_abs_diff_eq!(f, closed, epsilon = 1e-10);
        }
    }

    #[test]
    fn gauge_choice_does_not_affect_diagonal_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = [0.4, -1.3, 0.7];
        let u = diagonal_z_propagator(theta);
        let base = encoded_fidelity(&u, &DfsState::new(0.6, 0.9)).unwrap();
        for _ in 0..10 {
            let gauge = [
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ];
            let state = DfsState::new(0.6, 0.9).with_gauge(gauge);
            assert_abs_diff_eq!(encoded_fidelity(&u, &state).unwrap(), base, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let u = DMatrix::from_diagonal_element(8, 8, Complex64::new(0.5, 0.0));
        let err = encoded_fidelity(&u, &DfsState::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, DfsError::NonUnitary { .. }));
    }
}
