//! Quantum state engine over named bit-registers.
//!
//! States are either pure vectors or density matrices. Every oracle the
//! laboratory needs is a classical reversible map, so gates reduce to basis
//! relabelings ([`BasisPermutation`]) plus Hadamard transforms on whole
//! registers. Randomness is always drawn from a caller-supplied stream.

mod layout;
mod permutation;
mod state;

use thiserror::Error;

pub use layout::{Register, RegisterLayout};
pub use permutation::BasisPermutation;
pub use state::{Basis, MeasurementOutcome, QuantumState, StateKind};

use crate::bits::BitString;
use crate::scalar::Scalar;
use rand::RngCore;

/// Largest total width of a pure state.
pub const PURE_CAP: u32 = 20;
/// Largest total width of a density matrix.
pub const MIXED_CAP: u32 = 10;
/// Permutations up to this width keep a lookup table.
pub const TABLE_CAP: u32 = 16;
/// Largest width on which exhaustive bijectivity checks and inversion run.
pub const EXHAUSTIVE_CAP: u32 = 24;
/// Largest width of a function-form permutation.
pub const PERMUTATION_CAP: u32 = 48;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("register `{0}` has no assigned value")]
    Unassigned(String),
    #[error("register `{register}` expects {expected} bits, got {got}")]
    WidthMismatch {
        register: String,
        expected: u32,
        got: u32,
    },
    #[error("register `{0}` declared twice")]
    DuplicateRegister(String),
    #[error("register `{0}` has zero width")]
    ZeroWidth(String),
    #[error("total width {width} exceeds cap {cap}")]
    CapExceeded { width: u32, cap: u32 },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("not a bijection: inputs {first} and {second} both map to {image}")]
    NotABijection { first: u64, second: u64, image: u64 },
    #[error("register `{0}` is not preserved by the permutation")]
    RegisterNotPreserved(String),
    #[error("partial trace must keep at least one register")]
    EmptyKeepSet,
    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub fn make_basis_state<T: Scalar>(
    layout: &RegisterLayout,
    assignment: &[(&str, BitString)],
) -> Result<QuantumState<T>, QsimError> {
    QuantumState::basis(layout.clone(), assignment)
}

pub fn apply_permutation<T: Scalar>(
    state: &QuantumState<T>,
    perm: &BasisPermutation,
) -> Result<QuantumState<T>, QsimError> {
    state.apply_permutation(perm)
}

pub fn hadamard_register<T: Scalar>(
    state: &QuantumState<T>,
    register: &str,
) -> Result<QuantumState<T>, QsimError> {
    state.hadamard(register)
}

pub fn partial_trace<T: Scalar>(
    state: &QuantumState<T>,
    keep: &[&str],
) -> Result<QuantumState<T>, QsimError> {
    state.partial_trace(keep)
}

pub fn measure_register<T: Scalar>(
    state: &QuantumState<T>,
    register: &str,
    basis: Basis,
    rng: &mut dyn RngCore,
) -> Result<(MeasurementOutcome, QuantumState<T>), QsimError> {
    state.measure(register, basis, rng)
}

pub fn trace_distance<T: Scalar>(
    a: &QuantumState<T>,
    b: &QuantumState<T>,
) -> Result<f64, QsimError> {
    a.trace_distance(b)
}
