//! Pulse sequences: Hamiltonian-type schedules, pulse schedules, and
//! switching times.
//!
//! A sequence is a list of `N` evolution intervals on the normalized time
//! axis `[0, 1]`, each interval evolving under one of six Hamiltonian types,
//! with a swap pulse applied at the end of each interval (the last possibly
//! trivial). The types differ only in which bath each qubit sees: type `c`
//! couples qubit `j` to bath `α_c(j)`.
//!
//! # Toggling-frame semantics
//!
//! Physically the couplings never change — qubit `j` always sees bath `j`
//! (type 1) in the lab — and the pulses `Q_k` relabel the qubits. Writing
//! `R_k = Q_k⋯Q_1`, the lab propagator factorizes as
//!
//! ```text
//! U = Q_N e^{-iH·τ_N} ⋯ Q_1 e^{-iH·τ_1} = R_N · ∏_k e^{-i H̃_k τ_k},
//! H̃_k = R_{k-1}† H R_{k-1},
//! ```
//!
//! so when the pulses multiply to the identity (`R_N = 1`), the evolution is
//! exactly a product of the *toggled* Hamiltonians. The type schedule stored
//! here is that toggled sequence: with `q_k` the qubit relabeling of pulse
//! `k`, the bath assignments obey `α_{k+1} = q_k⁻¹ ∘ α_k`. Note the order:
//! conjugating the type-`c` operator by the pulse alone gives assignment
//! `α_c ∘ q`, which agrees with `q⁻¹ ∘ α_c` only when the two permutations
//! commute (always true for the cyclic-subgroup sequences, not for the
//! full-group ones) — the validator therefore checks the toggling-frame
//! rule, which is the one the factorization above requires.
//!
//! # Switching times
//!
//! Interval boundaries for the cyclic-group (`a3_*`) and full-group
//! (`s3_*`) sequences solve polynomial moment constraints: every type must
//! occupy the same generalized duration `∫ s^p ds` through order `n−1`.
//! Orders 1–10 are served from embedded data; higher orders call the
//! Newton solver in [`crate::solver`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Perm3;
use crate::solver::{self, SolveError};
use crate::tables;

/// One of the six bath-assignment Hamiltonian types.
///
/// Type `c` is `Σ_j Z_j B_{α_c(j)}` for a classical dephasing bath (or its
/// vector-coupling generalization for a quantum bath), where `α_c` maps each
/// qubit to the bath it sees. Types 1–3 are the even (cyclic) assignments,
/// 4–6 the odd ones.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum HamiltonianType {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
}

impl HamiltonianType {
    /// All six types in label order.
    pub const ALL: [HamiltonianType; 6] = [
        HamiltonianType::H1,
        HamiltonianType::H2,
        HamiltonianType::H3,
        HamiltonianType::H4,
        HamiltonianType::H5,
        HamiltonianType::H6,
    ];

    /// Numeric label 1–6.
    pub fn label(self) -> u8 {
        self as u8 + 1
    }

    /// Inverse of [`HamiltonianType::label`].
    pub fn from_label(label: u8) -> Option<HamiltonianType> {
        Self::ALL.get(label.checked_sub(1)? as usize).copied()
    }

    /// Bath assignment: qubit `j` (0-based) sees bath `alpha().apply(j)`.
    pub fn alpha(self) -> Perm3 {
        let images = match self {
            HamiltonianType::H1 => [0, 1, 2],
            HamiltonianType::H2 => [2, 0, 1],
            HamiltonianType::H3 => [1, 2, 0],
            HamiltonianType::H4 => [1, 0, 2],
            HamiltonianType::H5 => [2, 1, 0],
            HamiltonianType::H6 => [0, 2, 1],
        };
        Perm3::new(images).expect("fixed assignments are permutations")
    }

    /// Whether the bath assignment is an even permutation (types 1–3).
    pub fn is_even(self) -> bool {
        self.alpha().is_even()
    }

    /// Per-bath coefficients of this type in the first inter-qubit phase
    /// difference `θ1 − θ2`: entry `b` is the coefficient of bath `b+1`.
    ///
    /// Rows for the even types reproduce the bath-identification table of
    /// switching-function values; the odd-type rows extend it.
    pub fn f_row(self) -> [i8; 3] {
        let alpha = self.alpha();
        let mut row = [0i8; 3];
        row[alpha.apply(0)] += 1;
        row[alpha.apply(1)] -= 1;
        row
    }

    /// Diagonal of `Σ_j Z_j·baths[α(j)]` in the computational basis
    /// (qubit 1 the most significant bit).
    pub fn dephasing_diagonal(self, baths: [f64; 3]) -> [f64; 8] {
        let alpha = self.alpha();
        let mut diag = [0.0; 8];
        for (idx, d) in diag.iter_mut().enumerate() {
            for q in 0..3 {
                let bit = (idx >> (2 - q)) & 1;
                *d += (1.0 - 2.0 * bit as f64) * baths[alpha.apply(q)];
            }
        }
        diag
    }
}

/// A swap pulse applied between evolution intervals.
///
/// `P` is the cyclic relabeling realized as the qubit-2/3 swap following the
/// qubit-1/2 swap; `P12`/`P23` are the individual swaps; `None` is the
/// trivial pulse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pulse {
    P,
    PInv,
    P12,
    P23,
    None,
}

impl Pulse {
    /// All pulse kinds.
    pub const ALL: [Pulse; 5] = [Pulse::P, Pulse::PInv, Pulse::P12, Pulse::P23, Pulse::None];

    /// Serialization label: `"P"`, `"Pinv"`, `"P12"`, `"P23"`, `"none"`.
    pub fn label(self) -> &'static str {
        match self {
            Pulse::P => "P",
            Pulse::PInv => "Pinv",
            Pulse::P12 => "P12",
            Pulse::P23 => "P23",
            Pulse::None => "none",
        }
    }

    /// Inverse of [`Pulse::label`].
    pub fn from_label(label: &str) -> Option<Pulse> {
        Self::ALL.iter().copied().find(|p| p.label() == label)
    }

    /// The qubit relabeling `q` of this pulse: conjugation sends the
    /// qubit-`j` dephasing operator to qubit `q(j)`.
    pub fn perm(self) -> Perm3 {
        match self {
            Pulse::P => Perm3::CYCLE,
            Pulse::PInv => Perm3::CYCLE.inverse(),
            Pulse::P12 => Perm3::transposition(0, 1),
            Pulse::P23 => Perm3::transposition(1, 2),
            Pulse::None => Perm3::IDENTITY,
        }
    }

    /// The pulse with the given qubit relabeling, if one exists.
    ///
    /// The qubit-1/3 swap is not in the pulse set, so that relabeling maps
    /// to `None` (of the `Option`).
    pub fn from_perm(perm: &Perm3) -> Option<Pulse> {
        Self::ALL.iter().copied().find(|p| p.perm() == *perm)
    }

    /// The 8x8 permutation unitary of the pulse in the computational basis.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let q = self.perm();
        let mut m = DMatrix::zeros(8, 8);
        for idx in 0..8usize {
            m[(q.basis_image(idx), idx)] = Complex64::new(1.0, 0.0);
        }
        m
    }
}

/// Family a sequence belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SequenceGroup {
    /// Uniform-axis comparison sequence with sine-squared switching times.
    Udd,
    /// Cyclic-subgroup sequence over types 1–3.
    A3,
    /// Full-group sequence over all six types.
    S3,
    /// Anything else (e.g. the 26-interval quantum-bath sequence).
    Custom,
}

impl SequenceGroup {
    /// Serialization label: `"udd"`, `"a3"`, `"s3"`, `"custom"`.
    pub fn label(self) -> &'static str {
        match self {
            SequenceGroup::Udd => "udd",
            SequenceGroup::A3 => "a3",
            SequenceGroup::S3 => "s3",
            SequenceGroup::Custom => "custom",
        }
    }

    /// Inverse of [`SequenceGroup::label`].
    pub fn from_label(label: &str) -> Option<SequenceGroup> {
        [
            SequenceGroup::Udd,
            SequenceGroup::A3,
            SequenceGroup::S3,
            SequenceGroup::Custom,
        ]
        .into_iter()
        .find(|g| g.label() == label)
    }
}

/// Validation and parsing errors for pulse sequences.
#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("sequence with {intervals} intervals needs {intervals} pulses and {} interior times, got {pulses} and {times}", intervals.saturating_sub(1))]
    LengthMismatch {
        intervals: usize,
        times: usize,
        pulses: usize,
    },
    #[error("sequence must have at least one interval")]
    Empty,
    #[error("switching times must be strictly increasing inside (0, 1)")]
    NonMonotoneTimes,
    #[error("pulses do not multiply to the identity")]
    PulseProductNotIdentity,
    #[error("pulse after interval {index} does not map type {from} to type {to} in the toggling frame")]
    InconsistentTransition { index: usize, from: u8, to: u8 },
    #[error("transition after interval {index} requires a pulse outside the supported set")]
    UnsupportedTransition { index: usize },
    #[error("sequence of group {group} must start with type 1")]
    WrongInitialType { group: &'static str },
    #[error("unrecognized {what} label: {value}")]
    InvalidLabel { what: &'static str, value: String },
    #[error("malformed sequence JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// An immutable, validated pulse sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    group: SequenceGroup,
    order: u32,
    hamiltonians: Vec<HamiltonianType>,
    times: Vec<f64>,
    pulses: Vec<Pulse>,
}

impl PulseSequence {
    /// Builds and validates a sequence.
    ///
    /// `times` are the `N−1` interior switching times of the `N` intervals;
    /// `pulses` has one entry per interval (the last closes the pulse
    /// product). See [`PulseSequence::validate`] for the checks applied.
    pub fn new(
        group: SequenceGroup,
        order: u32,
        hamiltonians: Vec<HamiltonianType>,
        times: Vec<f64>,
        pulses: Vec<Pulse>,
    ) -> Result<PulseSequence, SequenceError> {
        let seq = PulseSequence {
            group,
            order,
            hamiltonians,
            times,
            pulses,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// Sequence family.
    pub fn group(&self) -> SequenceGroup {
        self.group
    }

    /// Decoupling order the sequence was constructed for.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Per-interval Hamiltonian types.
    pub fn hamiltonians(&self) -> &[HamiltonianType] {
        &self.hamiltonians
    }

    /// Interior switching times `t_1 < … < t_{N−1}`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Per-interval pulses.
    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    /// Number of evolution intervals `N`.
    pub fn num_intervals(&self) -> usize {
        self.hamiltonians.len()
    }

    /// All `N+1` interval boundaries, including 0 and 1.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.times.len() + 2);
        b.push(0.0);
        b.extend_from_slice(&self.times);
        b.push(1.0);
        b
    }

    /// Interval lengths `τ_k` (they sum to 1).
    pub fn durations(&self) -> Vec<f64> {
        self.boundaries().windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Total time spent in even-permutation types.
    pub fn even_time(&self) -> f64 {
        self.durations()
            .iter()
            .zip(&self.hamiltonians)
            .filter(|(_, h)| h.is_even())
            .map(|(d, _)| d)
            .sum()
    }

    /// Checks structural validity:
    ///
    /// 1. one pulse per interval and `N−1` interior times;
    /// 2. times strictly increasing inside `(0, 1)`;
    /// 3. every transition obeys the toggling-frame rule
    ///    `α_{k+1} = q_k⁻¹ ∘ α_k`;
    /// 4. the pulses multiply to the identity;
    /// 5. non-custom sequences start with type 1 (the lab assignment).
    pub fn validate(&self) -> Result<(), SequenceError> {
        let n = self.hamiltonians.len();
        if n == 0 {
            return Err(SequenceError::Empty);
        }
        if self.times.len() + 1 != n || self.pulses.len() != n {
            return Err(SequenceError::LengthMismatch {
                intervals: n,
                times: self.times.len(),
                pulses: self.pulses.len(),
            });
        }
        let mut prev = 0.0;
        for &t in &self.times {
            if !(t > prev && t < 1.0) {
                return Err(SequenceError::NonMonotoneTimes);
            }
            prev = t;
        }
        if self.group != SequenceGroup::Custom && self.hamiltonians[0] != HamiltonianType::H1 {
            return Err(SequenceError::WrongInitialType {
                group: self.group.label(),
            });
        }
        for k in 0..n - 1 {
            let expected = self.pulses[k]
                .perm()
                .inverse()
                .compose(&self.hamiltonians[k].alpha());
            if expected != self.hamiltonians[k + 1].alpha() {
                return Err(SequenceError::InconsistentTransition {
                    index: k + 1,
                    from: self.hamiltonians[k].label(),
                    to: self.hamiltonians[k + 1].label(),
                });
            }
        }
        let mut product = Perm3::IDENTITY;
        for p in &self.pulses {
            product = product.compose(&p.perm());
        }
        if product != Perm3::IDENTITY {
            return Err(SequenceError::PulseProductNotIdentity);
        }
        Ok(())
    }

    /// Serializes to the interchange JSON format (`group`, `order`,
    /// `hamiltonians` as integer labels, `times` as 16-significant-digit
    /// decimal strings, `pulses` as labels).
    pub fn to_json(&self) -> String {
        let doc = SequenceJson {
            group: self.group.label().to_string(),
            order: self.order,
            hamiltonians: self.hamiltonians.iter().map(|h| h.label()).collect(),
            times: self.times.iter().map(|&t| format_time_16(t)).collect(),
            pulses: self.pulses.iter().map(|p| p.label().to_string()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    /// Parses and validates a sequence from the interchange JSON format.
    pub fn from_json(text: &str) -> Result<PulseSequence, SequenceError> {
        let doc: SequenceJson = serde_json::from_str(text)?;
        let group =
            SequenceGroup::from_label(&doc.group).ok_or_else(|| SequenceError::InvalidLabel {
                what: "group",
                value: doc.group.clone(),
            })?;
        let hamiltonians = doc
            .hamiltonians
            .iter()
            .map(|&l| {
                HamiltonianType::from_label(l).ok_or(SequenceError::InvalidLabel {
                    what: "hamiltonian",
                    value: l.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let times = doc
            .times
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| SequenceError::InvalidLabel {
                    what: "time",
                    value: s.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let pulses = doc
            .pulses
            .iter()
            .map(|s| {
                Pulse::from_label(s).ok_or_else(|| SequenceError::InvalidLabel {
                    what: "pulse",
                    value: s.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PulseSequence::new(group, doc.order, hamiltonians, times, pulses)
    }

    /// Interior switching times as CSV, one per row, 16 significant digits.
    pub fn times_csv(&self) -> String {
        let mut out = String::new();
        for &t in &self.times {
            out.push_str(&format_time_16(t));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    group: String,
    order: u32,
    hamiltonians: Vec<u8>,
    times: Vec<String>,
    pulses: Vec<String>,
}

/// Formats a positive value with 16 significant decimal digits in plain
/// positional notation (the interchange convention for switching times).
pub fn format_time_16(x: f64) -> String {
    assert!(x.is_finite(), "times must be finite");
    if x == 0.0 {
        return "0.0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (15 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Switching times of the uniform-axis comparison sequence of order `n`:
/// `t_j = sin²(jπ / (2(n+1)))` for `j = 1…n`.
pub fn udd_times(n: u32) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let s = (j as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin();
            s * s
        })
        .collect()
}

/// Derives the pulse schedule realizing a type schedule in the toggling
/// frame: pulse `k` maps assignment `α_k` to `α_{k+1}` via
/// `q_k = α_k ∘ α_{k+1}⁻¹`, and the final pulse closes the product to the
/// identity.
pub fn pulse_schedule(hamiltonians: &[HamiltonianType]) -> Result<Vec<Pulse>, SequenceError> {
    if hamiltonians.is_empty() {
        return Err(SequenceError::Empty);
    }
    let mut pulses = Vec::with_capacity(hamiltonians.len());
    let mut product = Perm3::IDENTITY;
    for k in 0..hamiltonians.len() - 1 {
        let q = hamiltonians[k]
            .alpha()
            .compose(&hamiltonians[k + 1].alpha().inverse());
        let pulse =
            Pulse::from_perm(&q).ok_or(SequenceError::UnsupportedTransition { index: k + 1 })?;
        product = product.compose(&q);
        pulses.push(pulse);
    }
    let closing = product.inverse();
    let last = Pulse::from_perm(&closing).ok_or(SequenceError::UnsupportedTransition {
        index: hamiltonians.len(),
    })?;
    pulses.push(last);
    Ok(pulses)
}

fn repeat_pattern(pattern: &[HamiltonianType], len: usize) -> Vec<HamiltonianType> {
    pattern.iter().copied().cycle().take(len).collect()
}

/// Type schedule of the order-`n` cyclic-group sequence: the first `2n+1`
/// entries of the repeating period {1, 2, 3, 2}.
pub fn a3_hamiltonians(n: u32) -> Vec<HamiltonianType> {
    use HamiltonianType::*;
    if n == 0 {
        return vec![H1];
    }
    repeat_pattern(&[H1, H2, H3, H2], 2 * n as usize + 1)
}

/// Type schedule of the order-`n` full-group sequence: the first `5n+1`
/// entries of the repeating period {1, 4, 2, 5, 3, 6, 3, 5, 2, 4}.
pub fn s3_hamiltonians(n: u32) -> Vec<HamiltonianType> {
    use HamiltonianType::*;
    if n == 0 {
        return vec![H1];
    }
    repeat_pattern(&[H1, H4, H2, H5, H3, H6, H3, H5, H2, H4], 5 * n as usize + 1)
}

fn reflect_half(half: &[f64]) -> Vec<f64> {
    let mut full = half.to_vec();
    full.extend(half.iter().rev().map(|&t| 1.0 - t));
    full
}

/// Full switching-time set of the order-`n` cyclic-group sequence
/// (embedded data for `n ≤ 10`, solver beyond).
pub fn a3_times(n: u32) -> Result<Vec<f64>, SolveError> {
    match n {
        0 => Ok(Vec::new()),
        1..=10 => Ok(reflect_half(tables::A3_HALF[n as usize - 1])),
        _ => solver::solve_a3_times(n),
    }
}

/// Full switching-time set of the order-`n` full-group sequence: the
/// sorted union of the sequence-specific times, the cyclic-group times,
/// and the uniform-axis times (embedded data for `n ≤ 10`, solver beyond).
pub fn s3_times(n: u32) -> Result<Vec<f64>, SolveError> {
    match n {
        0 => Ok(Vec::new()),
        1..=10 => {
            let mut all = reflect_half(tables::S3_STAR_HALF[n as usize - 1]);
            all.extend(a3_times(n)?);
            all.extend(udd_times(n));
            all.sort_by(|a, b| a.partial_cmp(b).expect("times are finite"));
            Ok(all)
        }
        _ => solver::solve_s3_times(n),
    }
}

/// The order-`n` uniform-axis comparison sequence, encoded as alternating
/// types 1/2 so its first bath-difference switching function is the
/// alternating ±1 pattern.
pub fn udd_sequence(n: u32) -> PulseSequence {
    use HamiltonianType::*;
    let hamiltonians = repeat_pattern(&[H1, H2], n as usize + 1);
    let pulses = pulse_schedule(&hamiltonians).expect("alternating schedule is realizable");
    PulseSequence::new(SequenceGroup::Udd, n, hamiltonians, udd_times(n), pulses)
        .expect("constructed sequence is valid")
}

/// The order-`n` cyclic-group decoupling sequence (`2n+1` intervals).
pub fn a3_sequence(n: u32) -> Result<PulseSequence, SolveError> {
    let hamiltonians = a3_hamiltonians(n);
    let pulses = pulse_schedule(&hamiltonians).expect("cyclic schedule is realizable");
    let times = a3_times(n)?;
    Ok(
        PulseSequence::new(SequenceGroup::A3, n, hamiltonians, times, pulses)
            .expect("constructed sequence is valid"),
    )
}

/// The order-`n` full-group decoupling sequence (`5n+1` intervals).
pub fn s3_sequence(n: u32) -> Result<PulseSequence, SolveError> {
    let hamiltonians = s3_hamiltonians(n);
    let pulses = pulse_schedule(&hamiltonians).expect("full-group schedule is realizable");
    let times = s3_times(n)?;
    Ok(
        PulseSequence::new(SequenceGroup::S3, n, hamiltonians, times, pulses)
            .expect("constructed sequence is valid"),
    )
}

/// The 26-interval third-order quantum-bath decoupling sequence.
///
/// Doubly palindromic: the second 13 interval lengths repeat the first 13,
/// the second 13 types are the odd-permutation images of the first 13 under
/// right-composition with the qubit-1/2 swap (1→4, 2→6, 3→5), and each half
/// sums to exactly half the total time.
pub fn qdd3_sequence() -> PulseSequence {
    let first: Vec<HamiltonianType> = tables::QDD3_TYPES_FIRST_HALF
        .iter()
        .map(|&l| HamiltonianType::from_label(l).expect("labels are 1..=3"))
        .collect();
    let swap = Perm3::transposition(0, 1);
    let second: Vec<HamiltonianType> = first
        .iter()
        .map(|h| {
            let alpha = h.alpha().compose(&swap);
            HamiltonianType::ALL
                .into_iter()
                .find(|c| c.alpha() == alpha)
                .expect("composed assignment is one of the six types")
        })
        .collect();
    let mut hamiltonians = first;
    hamiltonians.extend(second);

    let mut times = Vec::with_capacity(25);
    let mut acc = 0.0;
    for half in 0..2 {
        for (i, &len) in tables::QDD3_LENGTHS_FIRST_HALF.iter().enumerate() {
            if half == 1 && i == tables::QDD3_LENGTHS_FIRST_HALF.len() - 1 {
                break; // final boundary is the fixed endpoint 1
            }
            acc += len;
            times.push(acc);
        }
    }

    let pulses = pulse_schedule(&hamiltonians).expect("published schedule is realizable");
    PulseSequence::new(SequenceGroup::Custom, 3, hamiltonians, times, pulses)
        .expect("constructed sequence is valid")
}

/// Piecewise-constant switching functions of a sequence.
///
/// For sequences over at most three types these are the bath-difference
/// functions `f1, f2, f3` (per-interval table lookups, `f3 = −(f1+f2)`).
/// Sequences visiting four or more types instead carry the independent
/// type-indicator differences `g_i = 1[type = c_i] − 1[type = c_{i+1}]`
/// along the order of first appearance `c_1, …, c_d` — the constraint
/// functions whose vanishing moments define order-`n` decoupling.
#[derive(Clone, Debug)]
pub struct SwitchingFunctions {
    /// All `N+1` interval boundaries, including 0 and 1.
    pub boundaries: Vec<f64>,
    /// One short label per function (`"f1"…` or `"g1"…`).
    pub labels: Vec<String>,
    /// `values[i][k]` is the value of function `i` on interval `k`.
    pub values: Vec<Vec<i8>>,
    /// Number of linearly independent constraint functions among the rows.
    pub independent: usize,
}

/// Computes the switching functions of a sequence (see
/// [`SwitchingFunctions`]).
pub fn switching_functions(seq: &PulseSequence) -> SwitchingFunctions {
    let mut distinct: Vec<HamiltonianType> = Vec::new();
    for &h in seq.hamiltonians() {
        if !distinct.contains(&h) {
            distinct.push(h);
        }
    }
    let boundaries = seq.boundaries();
    if distinct.len() <= 3 {
        let values: Vec<Vec<i8>> = (0..3)
            .map(|i| seq.hamiltonians().iter().map(|h| h.f_row()[i]).collect())
            .collect();
        SwitchingFunctions {
            boundaries,
            labels: vec!["f1".into(), "f2".into(), "f3".into()],
            values,
            independent: distinct.len().saturating_sub(1).min(2),
        }
    } else {
        let values: Vec<Vec<i8>> = distinct
            .windows(2)
            .map(|pair| {
                seq.hamiltonians()
                    .iter()
                    .map(|&h| {
                        if h == pair[0] {
                            1
                        } else if h == pair[1] {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let labels = (1..distinct.len()).map(|i| format!("g{i}")).collect();
        SwitchingFunctions {
            boundaries,
            labels,
            values,
            independent: distinct.len() - 1,
        }
    }
}

/// Moment residuals `∫₀¹ f_i(s)·s^p ds` of a sequence's switching functions
/// for `p = 0…n−1`, evaluated in closed form.
///
/// Row `i` corresponds to function `i` of [`switching_functions`]; an
/// order-`n` decoupling sequence has every entry equal to zero.
pub fn moment_residuals(seq: &PulseSequence, n: u32) -> Vec<Vec<f64>> {
    let funcs = switching_functions(seq);
    funcs
        .values
        .iter()
        .map(|row| {
            (0..n)
                .map(|p| {
                    let e = p as i32 + 1;
                    let mut acc = 0.0;
                    for (k, &v) in row.iter().enumerate() {
                        if v != 0 {
                            let lo = funcs.boundaries[k].powi(e);
                            let hi = funcs.boundaries[k + 1].powi(e);
                            acc += v as f64 * (hi - lo) / e as f64;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliWord};
    use approx::assert_abs_diff_eq;

    fn max_residual(seq: &PulseSequence, n: u32) -> f64 {
        moment_residuals(seq, n)
            .iter()
            .flatten()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }

    #[test]
    fn udd_times_match_formula() {
        assert!(udd_times(0).is_empty());
        let t1 = udd_times(1);
        assert_abs_diff_eq!(t1[0], 0.5, epsilon = 1e-15);
        let t3 = udd_times(3);
        assert_abs_diff_eq!(t3[0], 0.146447, epsilon = 1e-6);
        assert_abs_diff_eq!(t3[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t3[2], 0.853553, epsilon = 1e-6);
    }

    #[test]
    fn full_swap_factors_into_adjacent_swaps() {
        let lhs = Pulse::P.matrix();
        let rhs = Pulse::P23.matrix() * Pulse::P12.matrix();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pulse_conjugation_relabels_dephasing_operators() {
        // Q† Z_j Q = Z_{q(j)} with q the pulse relabeling.
        for pulse in Pulse::ALL {
            let u = pulse.matrix();
            for j in 1..=3usize {
                let z = PauliWord::single(j, Pauli::Z).matrix();
                let conj = u.adjoint() * &z * &u;
                let expect = PauliWord::single(pulse.perm().apply(j - 1) + 1, Pauli::Z).matrix();
                assert_eq!(conj, expect);
            }
        }
    }

    #[test]
    fn first_order_cyclic_sequence_matches_construction() {
        let seq = a3_sequence(1).unwrap();
        use HamiltonianType::*;
        assert_eq!(seq.hamiltonians(), &[H1, H2, H3]);
        assert_eq!(seq.pulses(), &[Pulse::P, Pulse::P, Pulse::P]);
        assert_abs_diff_eq!(seq.times()[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(seq.times()[1], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn second_order_cyclic_sequence_has_no_final_pulse() {
        let seq = a3_sequence(2).unwrap();
        let expect = [1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0, 5.0 / 6.0];
        for (t, e) in seq.times().iter().zip(expect) {
            assert_abs_diff_eq!(*t, e, epsilon = 1e-15);
        }
        assert_eq!(
            seq.pulses(),
            &[Pulse::P, Pulse::P, Pulse::PInv, Pulse::PInv, Pulse::None]
        );
    }

    #[test]
    fn third_order_cyclic_sequence_matches_reference() {
        let seq = a3_sequence(3).unwrap();
        use HamiltonianType::*;
        assert_eq!(seq.hamiltonians(), &[H1, H2, H3, H2, H1, H2, H3]);
        assert_eq!(
            seq.pulses(),
            &[
                Pulse::P,
                Pulse::P,
                Pulse::PInv,
                Pulse::PInv,
                Pulse::P,
                Pulse::P,
                Pulse::P
            ]
        );
        assert_abs_diff_eq!(seq.times()[0], 0.0930802599812912, epsilon = 1e-16);
    }

    #[test]
    fn first_order_full_group_sequence_matches_reference() {
        let seq = s3_sequence(1).unwrap();
        use HamiltonianType::*;
        assert_eq!(seq.hamiltonians(), &[H1, H4, H2, H5, H3, H6]);
        assert_eq!(
            seq.pulses(),
            &[
                Pulse::P12,
                Pulse::P23,
                Pulse::P12,
                Pulse::P23,
                Pulse::P12,
                Pulse::P23
            ]
        );
        let expect = [1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0];
        for (t, e) in seq.times().iter().zip(expect) {
            assert_abs_diff_eq!(*t, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(seq.even_time(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn second_order_full_group_times_contain_all_three_families() {
        let seq = s3_sequence(2).unwrap();
        for expect in [
            1.0 / 12.0,
            5.0 / 12.0,   // sequence-specific
            1.0 / 6.0,
            5.0 / 6.0,    // cyclic-group
            0.25,
            0.75,         // uniform-axis
        ] {
            assert!(
                seq.times().iter().any(|t| (t - expect).abs() < 1e-15),
                "missing time {expect}"
            );
        }
        assert_abs_diff_eq!(seq.even_time(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn stored_orders_satisfy_moment_constraints() {
        for n in 1..=10 {
            let a3 = a3_sequence(n).unwrap();
            assert!(
                max_residual(&a3, n) < 1e-12,
                "cyclic order {n} residual too large"
            );
            let s3 = s3_sequence(n).unwrap();
            assert!(
                max_residual(&s3, n) < 1e-12,
                "full-group order {n} residual too large"
            );
            assert_abs_diff_eq!(s3.even_time(), 0.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn switching_times_are_symmetric_about_one_half() {
        for n in 1..=10 {
            for seq in [a3_sequence(n).unwrap(), s3_sequence(n).unwrap()] {
                let t = seq.times();
                for (a, b) in t.iter().zip(t.iter().rev()) {
                    assert_abs_diff_eq!(a + b, 1.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn cyclic_times_bracket_uniform_axis_times() {
        for n in 1..=10 {
            let a3 = a3_times(n).unwrap();
            let udd = udd_times(n);
            for (j, u) in udd.iter().enumerate() {
                assert!(
                    a3[2 * j] < *u && *u < a3[2 * j + 1],
                    "order {n}: pair ({}, {}) fails to bracket {u}",
                    a3[2 * j],
                    a3[2 * j + 1]
                );
            }
        }
    }

    #[test]
    fn toggling_frame_reproduces_type_schedule() {
        // R_k† H1 R_k must equal the scheduled type k+1 for numeric baths.
        let baths = [1.0, 2.3, -0.7];
        let h1 = HamiltonianType::H1.dephasing_diagonal(baths);
        for seq in [
            a3_sequence(2).unwrap(),
            s3_sequence(1).unwrap(),
            s3_sequence(2).unwrap(),
            qdd3_sequence(),
        ] {
            let mut frame = Perm3::IDENTITY; // relabeling of R_k
            for k in 0..seq.num_intervals() {
                // Diagonal of R† H1 R: entry idx picks up h1 at the image of idx.
                let scheduled = seq.hamiltonians()[k].dephasing_diagonal(baths);
                for idx in 0..8 {
                    let toggled = h1[frame.basis_image(idx)];
                    assert_abs_diff_eq!(toggled, scheduled[idx], epsilon = 1e-14);
                }
                frame = frame.compose(&seq.pulses()[k].perm());
            }
            assert_eq!(frame, Perm3::IDENTITY);
        }
    }

    #[test]
    fn quantum_bath_sequence_is_doubly_palindromic() {
        let seq = qdd3_sequence();
        assert_eq!(seq.num_intervals(), 26);
        let d = seq.durations();
        let (first, second) = d.split_at(13);
        for (a, b) in first.iter().zip(second) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        for (a, b) in first.iter().zip(first.iter().rev()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        let half_sum: f64 = first.iter().sum();
        assert_abs_diff_eq!(half_sum, 0.5, epsilon = 1e-15);
        // Even types first, their odd images second (1→4, 2→6, 3→5).
        use HamiltonianType::*;
        let map = |h: HamiltonianType| match h {
            H1 => H4,
            H2 => H6,
            H3 => H5,
            other => other,
        };
        for k in 0..13 {
            assert!(seq.hamiltonians()[k].is_even());
            assert_eq!(seq.hamiltonians()[13 + k], map(seq.hamiltonians()[k]));
        }
        assert_eq!(seq.pulses()[12], Pulse::P12);
        assert_eq!(seq.pulses()[25], Pulse::P12);
        assert_eq!(&seq.pulses()[..12], &seq.pulses()[13..25]);
    }

    #[test]
    fn quantum_bath_sequence_intervals_match_reference() {
        let seq = qdd3_sequence();
        use HamiltonianType::*;
        assert_eq!(
            &seq.hamiltonians()[..13],
            &[H1, H2, H3, H2, H1, H3, H1, H2, H1, H3, H2, H3, H1]
        );
        assert_abs_diff_eq!(seq.durations()[0], 0.02443154605193963, epsilon = 1e-17);
        assert_abs_diff_eq!(seq.durations()[6], 0.02513261117647280, epsilon = 1e-16);
        assert_eq!(
            &seq.pulses()[..6],
            &[
                Pulse::P,
                Pulse::P,
                Pulse::PInv,
                Pulse::PInv,
                Pulse::PInv,
                Pulse::P
            ]
        );
    }

    #[test]
    fn switching_function_values_match_lookup_table() {
        let funcs = switching_functions(&a3_sequence(1).unwrap());
        assert_eq!(funcs.values[0], vec![1, -1, 0]);
        assert_eq!(funcs.values[1], vec![-1, 0, 1]);
        assert_eq!(funcs.values[2], vec![0, 1, -1]);
        assert_eq!(funcs.independent, 2);
    }

    #[test]
    fn third_bath_function_is_minus_sum_of_first_two() {
        for h in HamiltonianType::ALL {
            let [f1, f2, f3] = h.f_row();
            assert_eq!(f3, -(f1 + f2));
        }
    }

    #[test]
    fn full_group_sequences_carry_five_constraint_functions() {
        let funcs = switching_functions(&s3_sequence(1).unwrap());
        assert_eq!(funcs.independent, 5);
        assert_eq!(funcs.values.len(), 5);
        // Indicator difference of the first two scheduled types.
        assert_eq!(funcs.values[0], vec![1, -1, 0, 0, 0, 0]);
    }

    #[test]
    fn free_evolution_has_unit_zeroth_moment() {
        let seq = a3_sequence(0).unwrap();
        assert_eq!(seq.num_intervals(), 1);
        assert_eq!(seq.pulses(), &[Pulse::None]);
        let res = moment_residuals(&seq, 1);
        assert_abs_diff_eq!(res[0][0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn second_order_first_moment_vanishes_by_hand_integration() {
        // With times {1/6, 1/3, 2/3, 5/6}: (1 − 3 + 0 − 9 + 11)/72 = 0.
        let seq = a3_sequence(2).unwrap();
        let res = moment_residuals(&seq, 2);
        assert_abs_diff_eq!(res[0][1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_axis_sequence_is_valid_and_alternating() {
        let seq = udd_sequence(2);
        assert_eq!(seq.times(), &udd_times(2)[..]);
        let funcs = switching_functions(&seq);
        assert_eq!(funcs.values[0], vec![1, -1, 1]);
        assert_eq!(funcs.independent, 1);
    }

    #[test]
    fn json_roundtrip_preserves_sequences() {
        for seq in [
            a3_sequence(3).unwrap(),
            s3_sequence(2).unwrap(),
            qdd3_sequence(),
            udd_sequence(4),
        ] {
            let text = seq.to_json();
            let parsed = PulseSequence::from_json(&text).unwrap();
            assert_eq!(parsed.group(), seq.group());
            assert_eq!(parsed.order(), seq.order());
            assert_eq!(parsed.hamiltonians(), seq.hamiltonians());
            assert_eq!(parsed.pulses(), seq.pulses());
            for (a, b) in parsed.times().iter().zip(seq.times()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn sixteen_digit_format_is_stable() {
        assert_eq!(format_time_16(0.5), "0.5000000000000000");
        assert_eq!(
            format_time_16(0.0930802599812912),
            "0.09308025998129120"
        );
        let x = 0.0930802599812912;
        assert_eq!(format_time_16(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn validation_rejects_malformed_sequences() {
        use HamiltonianType::*;
        // Wrong pulse for the transition.
        let err = PulseSequence::new(
            SequenceGroup::Custom,
            1,
            vec![H1, H2],
            vec![0.5],
            vec![Pulse::P12, Pulse::P12],
        )
        .unwrap_err();
        assert!(matches!(err, SequenceError::InconsistentTransition { .. }));
        // Open pulse product.
        let err = PulseSequence::new(
            SequenceGroup::Custom,
            1,
            vec![H1, H2],
            vec![0.5],
            vec![Pulse::P, Pulse::None],
        )
        .unwrap_err();
        assert!(matches!(err, SequenceError::PulseProductNotIdentity));
        // Non-monotone times.
        let err = PulseSequence::new(
            SequenceGroup::Custom,
            1,
            vec![H1, H2, H3],
            vec![0.7, 0.3],
            vec![Pulse::P, Pulse::P, Pulse::P],
        )
        .unwrap_err();
        assert!(matches!(err, SequenceError::NonMonotoneTimes));
    }
}
