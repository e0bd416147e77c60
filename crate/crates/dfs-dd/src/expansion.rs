//! Order-by-order operator expansion of interval-propagator products over
//! noncommuting bath operators.
//!
//! For a quantum bath each Hamiltonian type is the formal sum
//! `H_c = B₀ + Σ_b S⃗_{q_c(b)} · B⃗_b` — one pure-bath symbol plus nine
//! coupling terms pairing a system Pauli with a formal bath symbol, where
//! qubit `q_c(b)` is the one type `c` couples to bath `b`. The bath symbols
//! commute with nothing, so the expansion of
//! `U = e^{−iH_{σ(N)}τ_N} ⋯ e^{−iH_{σ(1)}τ_1}` (later intervals on the
//! left) is a ledger of ordered words: coefficients keyed by a system Pauli
//! word and an ordered bath word, graded by total order in `τ`.
//!
//! A sequence decouples the quantum bath to order `m` when, at every order
//! `k ≤ m`, coefficients are constant on each orbit of Pauli words under
//! qubit relabeling for every fixed bath word — the expansion then couples
//! the system only through total-spin combinations, which act trivially on
//! the encoded quantum number. [`globalization_report`] measures exactly
//! that spread (absent orbit members count as zero).

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::pauli::{pauli_orbits, Pauli, PauliWord};
use crate::perm::Perm3;
use crate::sequence::{HamiltonianType, PulseSequence};

/// Highest supported expansion order (word storage and cost are sized for
/// this; combinatorial growth makes higher orders a different tool).
pub const MAX_EXPANSION_ORDER: u32 = 4;

/// Relative coefficient-spread tolerance for globalization verdicts.
pub const GLOBALIZATION_TOL: f64 = 1e-10;

/// Errors from the expansion engine.
#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("expansion order {requested} exceeds the supported bound {max}")]
    OrderTooLarge { requested: u32, max: u32 },
}

/// One of the ten formal bath symbols: the pure-bath operator `B₀` or a
/// coupling component `B_{b,a}` (bath `b ∈ {1,2,3}`, axis `a ∈ {x,y,z}`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BathSymbol(u8);

impl BathSymbol {
    /// The pure-bath symbol `B₀`.
    pub const PURE: BathSymbol = BathSymbol(0);
    /// Number of distinct symbols.
    pub const COUNT: usize = 10;

    /// The coupling symbol `B_{bath,axis}`; `bath` is 1-based.
    pub fn coupling(bath: usize, axis: Pauli) -> BathSymbol {
        assert!((1..=3).contains(&bath), "bath index must be 1..=3");
        let a = match axis {
            Pauli::X => 0,
            Pauli::Y => 1,
            Pauli::Z => 2,
            Pauli::I => panic!("identity is not a coupling axis"),
        };
        BathSymbol((1 + 3 * (bath - 1) + a) as u8)
    }

    /// Dense index 0..10 (`B₀` first, then bath-major, axis-minor).
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Inverse of [`BathSymbol::index`].
    pub fn from_index(index: usize) -> BathSymbol {
        assert!(index < Self::COUNT);
        BathSymbol(index as u8)
    }

    /// Whether this is the pure-bath symbol.
    pub fn is_pure(self) -> bool {
        self.0 == 0
    }

    /// The 1-based bath index of a coupling symbol.
    pub fn bath(self) -> Option<usize> {
        (!self.is_pure()).then(|| (self.0 as usize - 1) / 3 + 1)
    }

    /// The axis of a coupling symbol.
    pub fn axis(self) -> Option<Pauli> {
        (!self.is_pure()).then(|| match (self.0 - 1) % 3 {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        })
    }

    /// Short label: `"B0"`, `"B1x"`, `"B3z"`, …
    pub fn label(self) -> String {
        match (self.bath(), self.axis()) {
            (Some(b), Some(a)) => format!("B{b}{}", a.label().to_ascii_lowercase()),
            _ => "B0".to_string(),
        }
    }
}

/// An ordered word of bath symbols, length ≤ [`MAX_EXPANSION_ORDER`].
///
/// Order is load-bearing: bath operators do not commute, and the word
/// stores symbols left-to-right as they appear in the operator product
/// (leftmost = latest interval).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct BathWord {
    len: u8,
    syms: [u8; MAX_EXPANSION_ORDER as usize],
}

impl BathWord {
    /// The empty word (scalar terms).
    pub const EMPTY: BathWord = BathWord {
        len: 0,
        syms: [0; MAX_EXPANSION_ORDER as usize],
    };

    /// Word of a single symbol.
    pub fn single(symbol: BathSymbol) -> BathWord {
        let mut w = BathWord::EMPTY;
        w.syms[0] = symbol.0;
        w.len = 1;
        w
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Whether the word is empty.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The symbols, leftmost (latest) first.
    pub fn symbols(&self) -> impl Iterator<Item = BathSymbol> + '_ {
        self.syms[..self.len as usize].iter().map(|&s| BathSymbol(s))
    }

    /// Concatenation `self ++ right` (self is the left factor).
    pub fn concat(&self, right: &BathWord) -> BathWord {
        let total = self.len + right.len;
        assert!(
            total as u32 <= MAX_EXPANSION_ORDER,
            "bath word overflow: {total} symbols"
        );
        let mut w = *self;
        w.syms[self.len as usize..total as usize]
            .copy_from_slice(&right.syms[..right.len as usize]);
        w.len = total;
        w
    }

    /// Display label: `"ε"` for the empty word, else `"B1x·B0·…"`.
    pub fn label(&self) -> String {
        if self.is_empty() {
            "ε".to_string()
        } else {
            self.symbols()
                .map(|s| s.label())
                .collect::<Vec<_>>()
                .join("·")
        }
    }
}

/// The formal term list of Hamiltonian type `label`:
/// `(identity, B₀)` plus `(P_{q,a}, B_{b,a})` for each bath `b` and axis
/// `a`, with `q` the qubit that type couples to bath `b`. All coefficients
/// are 1.
pub fn quantum_hamiltonian(label: HamiltonianType) -> Vec<(PauliWord, BathSymbol)> {
    let mut terms = vec![(PauliWord::IDENTITY, BathSymbol::PURE)];
    let inverse = label.alpha().inverse();
    for bath in 1..=3usize {
        let qubit = inverse.apply(bath - 1) + 1;
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            terms.push((
                PauliWord::single(qubit, axis),
                BathSymbol::coupling(bath, axis),
            ));
        }
    }
    terms
}

/// Graded coefficient table of the expanded propagator product.
#[derive(Clone, Debug)]
pub struct ExpansionLedger {
    order: u32,
    grades: Vec<HashMap<(PauliWord, BathWord), Complex64>>,
}

impl ExpansionLedger {
    /// Expansion order `m` the ledger was computed through.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// All terms of total order `k` in the interval lengths.
    pub fn terms(&self, k: u32) -> &HashMap<(PauliWord, BathWord), Complex64> {
        &self.grades[k as usize]
    }

    /// Coefficient of `(pauli, word)` at order `k` (zero when absent).
    pub fn coefficient(&self, k: u32, pauli: PauliWord, word: BathWord) -> Complex64 {
        self.grades[k as usize]
            .get(&(pauli, word))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

fn multiply_left(
    left: &HashMap<(PauliWord, BathWord), Complex64>,
    right: &HashMap<(PauliWord, BathWord), Complex64>,
    scale: Complex64,
    into: &mut HashMap<(PauliWord, BathWord), Complex64>,
) {
    for (&(lp, lw), &lc) in left {
        for (&(rp, rw), &rc) in right {
            let (pauli, phase) = lp.product(&rp);
            let word = lw.concat(&rw);
            let entry = into.entry((pauli, word)).or_insert(Complex64::new(0.0, 0.0));
            *entry += scale * phase * lc * rc;
        }
    }
}

/// Powers `H, H², …, H^max` of a type's term list as coefficient maps.
fn hamiltonian_powers(
    label: HamiltonianType,
    max: u32,
) -> Vec<HashMap<(PauliWord, BathWord), Complex64>> {
    let base: HashMap<(PauliWord, BathWord), Complex64> = quantum_hamiltonian(label)
        .into_iter()
        .map(|(p, s)| ((p, BathWord::single(s)), Complex64::new(1.0, 0.0)))
        .collect();
    let mut powers = vec![base.clone()];
    for _ in 2..=max {
        let mut next = HashMap::new();
        multiply_left(
            &base,
            powers.last().expect("at least one power"),
            Complex64::new(1.0, 0.0),
            &mut next,
        );
        powers.push(next);
    }
    powers
}

/// Expands `U = ∏_k exp(−i H_{σ(k)} τ_k)` (later intervals on the left)
/// through total order `m` in the interval lengths.
pub fn expand_product(seq: &PulseSequence, m: u32) -> Result<ExpansionLedger, ExpansionError> {
    if m > MAX_EXPANSION_ORDER {
        return Err(ExpansionError::OrderTooLarge {
            requested: m,
            max: MAX_EXPANSION_ORDER,
        });
    }
    let mut grades: Vec<HashMap<(PauliWord, BathWord), Complex64>> =
        (0..=m).map(|_| HashMap::new()).collect();
    grades[0].insert(
        (PauliWord::IDENTITY, BathWord::EMPTY),
        Complex64::new(1.0, 0.0),
    );
    if m == 0 {
        return Ok(ExpansionLedger { order: 0, grades });
    }

    let mut power_cache: HashMap<HamiltonianType, Vec<HashMap<(PauliWord, BathWord), Complex64>>> =
        HashMap::new();
    let durations = seq.durations();
    for (k, &label) in seq.hamiltonians().iter().enumerate() {
        let tau = durations[k];
        let powers = power_cache
            .entry(label)
            .or_insert_with(|| hamiltonian_powers(label, m));
        // New factor multiplies from the LEFT; update grades in descending
        // order so each uses the previous interval's lower grades.
        let mut factor_scale = Complex64::new(1.0, 0.0);
        let scales: Vec<Complex64> = (1..=m)
            .map(|p| {
                factor_scale *= Complex64::new(0.0, -tau) / (p as f64);
                factor_scale
            })
            .collect();
        for n in (1..=m).rev() {
            // grades[n] += Σ_{p=1..n} scale_p · H^p · grades[n−p]
            let mut update = HashMap::new();
            for p in 1..=n {
                multiply_left(
                    &powers[p as usize - 1],
                    &grades[(n - p) as usize],
                    scales[p as usize - 1],
                    &mut update,
                );
            }
            let grade = &mut grades[n as usize];
            for (key, value) in update {
                *grade.entry(key).or_insert(Complex64::new(0.0, 0.0)) += value;
            }
        }
    }
    Ok(ExpansionLedger { order: m, grades })
}

/// Spread summary of one expansion order.
#[derive(Clone, Debug, Serialize)]
pub struct OrderSpreads {
    /// Expansion order the row describes.
    pub order: u32,
    /// Largest within-group coefficient spread, relative to `scale`.
    pub max_relative_spread: f64,
    /// Largest coefficient magnitude of the order (the spread normalizer).
    pub scale: f64,
    /// Number of (orbit, bath-word) groups examined.
    pub groups: usize,
}

/// Per-order globalization verdict for a sequence.
#[derive(Clone, Debug, Serialize)]
pub struct GlobalizationReport {
    /// Requested expansion order.
    pub order: u32,
    /// Highest order `v ≤ order` with every relative spread below
    /// [`GLOBALIZATION_TOL`] at all orders `≤ v`.
    pub verdict: u32,
    /// One spread summary per order `1…order`.
    pub per_order: Vec<OrderSpreads>,
}

impl GlobalizationReport {
    /// JSON rendering of the report.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Groups the expansion of `seq` at each order by (Pauli-word orbit, bath
/// word) and reports the maximum within-group coefficient spread; absent
/// orbit members count as zero coefficients.
pub fn globalization_report(
    seq: &PulseSequence,
    m: u32,
) -> Result<GlobalizationReport, ExpansionError> {
    let ledger = expand_product(seq, m)?;
    let orbits = pauli_orbits();
    let mut per_order = Vec::with_capacity(m as usize);
    for k in 1..=m {
        let terms = ledger.terms(k);
        let scale = terms
            .values()
            .fold(0.0f64, |acc, c| acc.max(c.norm()));
        // Group keys: (orbit id, bath word) of every present term.
        let mut groups: HashMap<(u8, BathWord), ()> = HashMap::new();
        for &(pauli, word) in terms.keys() {
            groups.insert((orbits.orbit_id(pauli), word), ());
        }
        let mut max_spread = 0.0f64;
        for &(orbit_id, word) in groups.keys() {
            let members = orbits.orbit(orbit_id);
            // Diameter of the coefficient set (absent members = 0).
            for i in 0..members.len() {
                let ci = ledger.coefficient(k, members[i], word);
                for j in i + 1..members.len() {
                    let cj = ledger.coefficient(k, members[j], word);
                    max_spread = max_spread.max((ci - cj).norm());
                }
            }
        }
        let relative = if scale > 0.0 { max_spread / scale } else { 0.0 };
        per_order.push(OrderSpreads {
            order: k,
            max_relative_spread: relative,
            scale,
            groups: groups.len(),
        });
    }
    let mut verdict = 0;
    for row in &per_order {
        if row.max_relative_spread < GLOBALIZATION_TOL {
            verdict = row.order;
        } else {
            break;
        }
    }
    Ok(GlobalizationReport {
        order: m,
        verdict,
        per_order,
    })
}

// ---------------------------------------------------------------------------
// Numeric instantiation (oracle plumbing for tests and verification).
// ---------------------------------------------------------------------------

/// Instantiates a Hamiltonian type as a dense matrix on
/// `system ⊗ bath = 8·d`, given one `d×d` matrix per bath symbol
/// (indexed by [`BathSymbol::index`]).
pub fn instantiate_hamiltonian(
    label: HamiltonianType,
    bath_matrices: &[DMatrix<Complex64>],
) -> DMatrix<Complex64> {
    assert_eq!(bath_matrices.len(), BathSymbol::COUNT);
    let d = bath_matrices[0].nrows();
    let mut h = DMatrix::zeros(8 * d, 8 * d);
    for (pauli, symbol) in quantum_hamiltonian(label) {
        h += pauli.matrix().kronecker(&bath_matrices[symbol.index()]);
    }
    h
}

/// Instantiates a full expansion ledger as a dense matrix (the truncated
/// propagator), multiplying each bath word out left-to-right.
pub fn instantiate_ledger(
    ledger: &ExpansionLedger,
    bath_matrices: &[DMatrix<Complex64>],
) -> DMatrix<Complex64> {
    assert_eq!(bath_matrices.len(), BathSymbol::COUNT);
    let d = bath_matrices[0].nrows();
    let mut total: DMatrix<Complex64> = DMatrix::zeros(8 * d, 8 * d);
    let eye_bath = DMatrix::identity(d, d);
    for k in 0..=ledger.order() {
        for (&(pauli, word), &coeff) in ledger.terms(k) {
            let mut bath = eye_bath.clone();
            for symbol in word.symbols() {
                bath = bath * &bath_matrices[symbol.index()];
            }
            total += pauli.matrix().kronecker(&bath) * coeff;
        }
    }
    total
}

/// Propagator `exp(−i H t)` of a Hermitian matrix via eigendecomposition.
pub fn hermitian_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let herm_dev = (h - h.adjoint()).norm();
    assert!(
        herm_dev <= 1e-10 * h.norm().max(1.0),
        "matrix is not Hermitian (deviation {herm_dev:.3e})"
    );
    let eigen = nalgebra::SymmetricEigen::new(h.clone());
    let phases = eigen
        .eigenvalues
        .map(|lambda| Complex64::new(0.0, -lambda * t).exp());
    let mut scaled = eigen.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * eigen.eigenvectors.adjoint()
}

/// Exact product of interval propagators (later intervals left) for given
/// numeric bath matrices — the oracle the truncated ledger is tested
/// against.
pub fn exact_product(
    seq: &PulseSequence,
    bath_matrices: &[DMatrix<Complex64>],
) -> DMatrix<Complex64> {
    let d = bath_matrices[0].nrows();
    let mut u = DMatrix::identity(8 * d, 8 * d);
    let durations = seq.durations();
    for (k, &label) in seq.hamiltonians().iter().enumerate() {
        let h = instantiate_hamiltonian(label, bath_matrices);
        u = hermitian_propagator(&h, durations[k]) * u;
    }
    u
}
