//! Synthesis and verification toolkit for exchange-only dynamical decoupling
//! of the 3-qubit decoherence-free subsystem.
//!
//! Three physical qubits, each dephasing against its own bath, carry one
//! encoded qubit that exchange (swap) pulses can protect: cyclically
//! permuting the qubits between free-evolution intervals reshuffles which
//! qubit sees which bath, and suitably chosen interval lengths cancel the
//! inter-bath phase differences order by order in time. This crate covers
//! the full pipeline:
//!
//! - [`dfs`] — the 8-state basis, valid-block projector, and the
//!   encoded-subsystem fidelity (closed form and full 8x8 propagator).
//! - [`perm`] / [`pauli`] — qubit permutations, Pauli-word algebra, and
//!   orbits of coupling terms under qubit relabeling.
//! - [`sequence`] — switching-time generators (uniform, concatenated-sine,
//!   cyclic-group and full-group sequences), pulse schedules, and
//!   serialization.
//! - [`solver`] — the moment-constraint Newton solver that produces
//!   switching times for arbitrary decoupling order.
//! - [`filter`] — overlap-integral filter functions, spectral densities,
//!   and decoherence integrals for classical dephasing.
//! - [`expansion`] — symbolic operator expansion of the toggled evolution
//!   over noncommuting bath operators, with order-by-order globalization
//!   verdicts.
//! - [`search`] — numeric search for new pulse sequences satisfying the
//!   moment constraints.
//! - [`bath`] / [`sim`] — seeded classical and 6-spin quantum bath models
//!   and the fidelity-scaling simulations built on them.
//! - [`quad`] / [`fitting`] — small numeric helpers (adaptive quadrature,
//!   least-squares power-law fits).

pub mod dfs;
pub mod filter;
pub mod fitting;
pub mod pauli;
pub mod perm;
pub mod quad;
pub mod sequence;
pub mod solver;
mod tables;

pub use dfs::{
    dfs_basis, diagonal_z_propagator, encoded_fidelity, fidelity_coefficients,
    fidelity_from_phases, projector_valid, DfsBasis, DfsError, DfsState, ValidProjector,
};
pub use filter::{
    chi, decoherence_w, filter_curve, filter_value, ChiRecord, FilterCurve, FilterError,
    SpectralDensity,
};
pub use pauli::{pauli_orbits, OrbitTable, Pauli, PauliWord};
pub use perm::Perm3;
pub use sequence::{
    a3_sequence, moment_residuals, qdd3_sequence, s3_sequence, switching_functions, udd_sequence,
    udd_times, HamiltonianType, Pulse, PulseSequence, SequenceError, SequenceGroup,
    SwitchingFunctions,
};
pub use solver::{solve_times, SolveError};
