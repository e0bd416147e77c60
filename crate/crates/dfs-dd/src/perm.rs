//! Permutations of the three constituent qubits.
//!
//! A [`Perm3`] is a bijection of `{0, 1, 2}` (qubit indices, zero-based).
//! Permutations appear in two roles that share this one type: as the action
//! of a swap/cycle pulse on qubit labels, and as the bath-assignment map of a
//! Hamiltonian type (which local bath each qubit currently sees).

use std::fmt;

/// A permutation of the three qubit indices `0, 1, 2`.
///
/// `map[i]` is the image of index `i`. Composition follows function
/// convention: `(a.compose(b))(i) = a(b(i))`, i.e. `b` acts first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Perm3 {
    map: [u8; 3],
}

impl Perm3 {
    /// The identity permutation.
    pub const IDENTITY: Perm3 = Perm3 { map: [0, 1, 2] };

    /// The forward 3-cycle `0 -> 1 -> 2 -> 0`.
    pub const CYCLE: Perm3 = Perm3 { map: [1, 2, 0] };

    /// All six permutations, identity first, even permutations before odd.
    pub const ALL: [Perm3; 6] = [
        Perm3 { map: [0, 1, 2] },
        Perm3 { map: [1, 2, 0] },
        Perm3 { map: [2, 0, 1] },
        Perm3 { map: [1, 0, 2] },
        Perm3 { map: [2, 1, 0] },
        Perm3 { map: [0, 2, 1] },
    ];

    /// Builds a permutation from its image array; `None` if not a bijection.
    pub fn new(map: [u8; 3]) -> Option<Perm3> {
        let mut seen = [false; 3];
        for &m in &map {
            if m > 2 || seen[m as usize] {
                return None;
            }
            seen[m as usize] = true;
        }
        Some(Perm3 { map })
    }

    /// The transposition swapping indices `a` and `b`.
    pub fn transposition(a: usize, b: usize) -> Perm3 {
        assert!(a < 3 && b < 3 && a != b, "transposition needs two distinct indices < 3");
        let mut map = [0u8, 1, 2];
        map.swap(a, b);
        Perm3 { map }
    }

    /// Image of index `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    /// Function composition: `self` after `other` (`other` acts first).
    pub fn compose(&self, other: &Perm3) -> Perm3 {
        Perm3 {
            map: [
                self.map[other.map[0] as usize],
                self.map[other.map[1] as usize],
                self.map[other.map[2] as usize],
            ],
        }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Perm3 {
        let mut map = [0u8; 3];
        for i in 0..3 {
            map[self.map[i] as usize] = i as u8;
        }
        Perm3 { map }
    }

    /// `true` for the identity and the two 3-cycles.
    pub fn is_even(&self) -> bool {
        // Count inversions; 3 elements have parity even iff 0 or 2 inversions.
        let m = &self.map;
        let inversions = (m[0] > m[1]) as usize + (m[0] > m[2]) as usize + (m[1] > m[2]) as usize;
        inversions % 2 == 0
    }

    /// The raw image array.
    pub fn images(&self) -> [u8; 3] {
        self.map
    }

    /// Permutation matrix on the 8-dimensional 3-qubit space.
    ///
    /// The unitary maps basis state `|x_1 x_2 x_3>` to `|x_{q(1)} x_{q(2)}
    /// x_{q(3)}>` where `q` is this permutation (so conjugation sends the
    /// single-qubit operator on qubit `j` to the same operator on qubit
    /// `q(j)`). Returned as the index map `dest[i] = image of basis index i`
    /// by [`Perm3::basis_image`]; this helper expands it to a dense matrix.
    pub fn basis_image(&self, index: usize) -> usize {
        debug_assert!(index < 8);
        let bits = [(index >> 2) & 1, (index >> 1) & 1, index & 1];
        // Output bit at position i is the input bit at position q(i).
        (bits[self.apply(0)] << 2) | (bits[self.apply(1)] << 1) | bits[self.apply(2)]
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.map[0] + 1, self.map[1] + 1, self.map[2] + 1)
    }
}
