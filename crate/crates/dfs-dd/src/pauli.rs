//! Three-letter Pauli words and their orbits under qubit permutations.
//!
//! System-bath couplings of the 3-qubit code are spanned by tensor products
//! of single-qubit Pauli operators — 64 words in total. Swap pulses permute
//! the qubits, so the natural grading of coupling terms is by *orbit* of a
//! word under the six qubit permutations: a coupling survives globalization
//! precisely when every member of an orbit carries the same coefficient, in
//! which case the sum is a function of total-spin operators only.

use num_complex::Complex64;

use crate::perm::Perm3;

/// A single-qubit Pauli letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// All four letters in encoding order.
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Encoding index: I=0, X=1, Y=2, Z=3.
    #[inline]
    pub fn index(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    /// Inverse of [`Pauli::index`].
    #[inline]
    pub fn from_index(i: u8) -> Pauli {
        Self::ALL[i as usize]
    }

    /// Single-letter product `self * other` as `(letter, phase)`.
    ///
    /// The phase is one of `1, i, -i` (products of distinct non-identity
    /// letters pick up `±i`; equal letters square to the identity).
    pub fn product(self, other: Pauli) -> (Pauli, Complex64) {
        use Pauli::*;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match (self, other) {
            (I, p) => (p, one),
            (p, I) => (p, one),
            (a, b) if a == b => (I, one),
            (X, Y) => (Z, i),
            (Y, X) => (Z, -i),
            (Y, Z) => (X, i),
            (Z, Y) => (X, -i),
            (Z, X) => (Y, i),
            (X, Z) => (Y, -i),
            _ => unreachable!(),
        }
    }

    /// The 2x2 matrix of the letter.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, z], [z, one]],
            Pauli::X => [[z, one], [one, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[one, z], [z, -one]],
        }
    }
}

/// A tensor product of three Pauli letters, one per qubit.
///
/// Canonically encoded as a base-4 integer in `0..64` with qubit 1 the most
/// significant digit (letters I=0, X=1, Y=2, Z=3).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PauliWord(u8);

impl PauliWord {
    /// The identity word `III`.
    pub const IDENTITY: PauliWord = PauliWord(0);

    /// Number of distinct words.
    pub const COUNT: usize = 64;

    /// Builds a word from per-qubit letters `[qubit 1, qubit 2, qubit 3]`.
    pub fn new(letters: [Pauli; 3]) -> PauliWord {
        PauliWord(letters[0].index() * 16 + letters[1].index() * 4 + letters[2].index())
    }

    /// The word with `letter` on the given qubit (1-based) and identity
    /// elsewhere.
    pub fn single(qubit: usize, letter: Pauli) -> PauliWord {
        assert!((1..=3).contains(&qubit), "qubit index must be 1..=3");
        let mut letters = [Pauli::I; 3];
        letters[qubit - 1] = letter;
        PauliWord::new(letters)
    }

    /// Canonical integer encoding in `0..64`.
    #[inline]
    pub fn index(self) -> u8 {
        self.0
    }

    /// Inverse of [`PauliWord::index`].
    #[inline]
    pub fn from_index(i: u8) -> PauliWord {
        debug_assert!(i < 64);
        PauliWord(i)
    }

    /// Per-qubit letters `[qubit 1, qubit 2, qubit 3]`.
    pub fn letters(self) -> [Pauli; 3] {
        [
            Pauli::from_index(self.0 / 16),
            Pauli::from_index((self.0 / 4) % 4),
            Pauli::from_index(self.0 % 4),
        ]
    }

    /// Number of non-identity letters (0..=3).
    pub fn weight(self) -> usize {
        self.letters().iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Word product `self * other` as `(word, phase)`; phases multiply
    /// letter-by-letter.
    pub fn product(self, other: PauliWord) -> (PauliWord, Complex64) {
        let a = self.letters();
        let b = other.letters();
        let mut letters = [Pauli::I; 3];
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 0..3 {
            let (l, ph) = a[q].product(b[q]);
            letters[q] = l;
            phase *= ph;
        }
        (PauliWord::new(letters), phase)
    }

    /// Relabels qubits: the letter on qubit `j` moves to qubit `perm(j)`.
    ///
    /// This matches conjugation by the permutation unitary of `perm`: a swap
    /// pulse taking qubit-`j` operators to qubit-`perm(j)` operators takes
    /// this word to the returned word.
    pub fn permuted(self, perm: &Perm3) -> PauliWord {
        let letters = self.letters();
        let mut out = [Pauli::I; 3];
        for q in 0..3 {
            out[perm.apply(q)] = letters[q];
        }
        PauliWord::new(out)
    }

    /// Dense 8x8 matrix of the word (qubit 1 most significant).
    pub fn matrix(self) -> nalgebra::DMatrix<Complex64> {
        let ms: Vec<_> = self.letters().iter().map(|p| p.matrix()).collect();
        let mut out = nalgebra::DMatrix::zeros(8, 8);
        for r in 0..8 {
            for c in 0..8 {
                let (r1, r2, r3) = ((r >> 2) & 1, (r >> 1) & 1, r & 1);
                let (c1, c2, c3) = ((c >> 2) & 1, (c >> 1) & 1, c & 1);
                out[(r, c)] = ms[0][r1][c1] * ms[1][r2][c2] * ms[2][r3][c3];
            }
        }
        out
    }
}

impl std::fmt::Display for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in self.letters() {
            write!(f, "{:?}", p)?;
        }
        Ok(())
    }
}

/// Partition of the 64 Pauli words into orbits under qubit permutations.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    orbit_id: [u8; 64],
    orbits: Vec<Vec<PauliWord>>,
}

impl OrbitTable {
    /// Orbit identifier of a word (orbits are numbered by their smallest
    /// member's encoding).
    pub fn orbit_id(&self, word: PauliWord) -> usize {
        self.orbit_id[word.index() as usize] as usize
    }

    /// All members of the orbit containing `word`, in encoding order.
    pub fn orbit_of(&self, word: PauliWord) -> &[PauliWord] {
        &self.orbits[self.orbit_id(word)]
    }

    /// The orbits, each sorted by encoding, ordered by smallest member.
    pub fn orbits(&self) -> &[Vec<PauliWord>] {
        &self.orbits
    }

    /// Number of orbits.
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }
}

/// Computes the orbit partition of all 64 words under the six qubit
/// permutations.
///
/// The orbit count is a result of this computation, not an input; callers
/// must not assume a particular value.
pub fn pauli_orbits() -> OrbitTable {
    let mut orbit_id = [u8::MAX; 64];
    let mut orbits = Vec::new();
    for idx in 0..64u8 {
        if orbit_id[idx as usize] != u8::MAX {
            continue;
        }
        let seed = PauliWord::from_index(idx);
        let mut members: Vec<PauliWord> =
            Perm3::ALL.iter().map(|p| seed.permuted(p)).collect();
        members.sort();
        members.dedup();
        let id = orbits.len() as u8;
        for w in &members {
            orbit_id[w.index() as usize] = id;
        }
        orbits.push(members);
    }
    OrbitTable { orbit_id, orbits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn letter_products_follow_cyclic_rule() {
        let (l, ph) = Pauli::X.product(Pauli::Y);
        assert_eq!(l, Pauli::Z);
        assert_abs_diff_eq!(ph.im, 1.0);
        let (l, ph) = Pauli::Y.product(Pauli::X);
        assert_eq!(l, Pauli::Z);
        assert_abs_diff_eq!(ph.im, -1.0);
        let (l, ph) = Pauli::Z.product(Pauli::Z);
        assert_eq!(l, Pauli::I);
        assert_abs_diff_eq!(ph.re, 1.0);
    }

    #[test]
    fn word_encoding_roundtrip() {
        for i in 0..64u8 {
            let w = PauliWord::from_index(i);
            assert_eq!(PauliWord::new(w.letters()).index(), i);
        }
    }

    #[test]
    fn word_product_tracks_phases() {
        // (X1)(Y1) = i Z1 on the first qubit, identity elsewhere.
        let x1 = PauliWord::single(1, Pauli::X);
        let y1 = PauliWord::single(1, Pauli::Y);
        let (w, ph) = x1.product(y1);
        assert_eq!(w, PauliWord::single(1, Pauli::Z));
        assert_abs_diff_eq!(ph.im, 1.0);
    }

    #[test]
    fn orbit_of_x1_is_the_three_single_x_words() {
        let table = pauli_orbits();
        let orbit = table.orbit_of(PauliWord::single(1, Pauli::X));
        let expected: Vec<_> = (1..=3).map(|q| PauliWord::single(q, Pauli::X)).collect();
        let mut expected = expected;
        expected.sort();
        assert_eq!(orbit, &expected[..]);
    }

    #[test]
    fn orbit_of_x1y2_has_six_members() {
        let table = pauli_orbits();
        let w = PauliWord::new([Pauli::X, Pauli::Y, Pauli::I]);
        assert_eq!(table.orbit_of(w).len(), 6);
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let table = pauli_orbits();
        assert_eq!(table.orbit_of(PauliWord::IDENTITY), &[PauliWord::IDENTITY]);
    }

    #[test]
    fn orbits_partition_all_words() {
        let table = pauli_orbits();
        let total: usize = table.orbits().iter().map(|o| o.len()).sum();
        assert_eq!(total, 64);
        for orbit in table.orbits() {
            assert!([1, 3, 6].contains(&orbit.len()), "orbit sizes divide 6");
        }
    }

    #[test]
    fn word_matrix_squares_to_identity() {
        let w = PauliWord::new([Pauli::X, Pauli::Y, Pauli::Z]);
        let m = w.matrix();
        let sq = &m * &m;
        for r in 0..8 {
            for c in 0..8 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sq[(r, c)].re, expect, epsilon = 1e-15);
                assert_abs_diff_eq!(sq[(r, c)].im, 0.0, epsilon = 1e-15);
            }
        }
    }
}
