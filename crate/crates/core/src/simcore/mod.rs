//! Dense state-vector simulation for small registers.
//!
//! Wire 0 is the most significant bit of a basis index, so the basis state
//! `|b0 b1 ... b(n-1)>` sits at index `b0·2^(n-1) + ... + b(n-1)`.
//! Global phase is never observable through this API; compare states with
//! [`fidelity_up_to_phase`].

mod angle;
mod density;
mod gate;
mod matrix;
mod outcome;
mod rng;
mod state;

pub use angle::Angle8;
pub use density::{density_from_ensemble, DensityMatrix};
pub use gate::{Gate, GateKind};
pub(crate) use matrix::{hadamard, mat2_identity, mat2_mul};
pub use matrix::{Mat2, Matrix};
pub use outcome::{OutcomeSource, ScriptedOutcomes};
pub use rng::{indexed_rng, party_rng, split_rng, SeededRng};
pub use state::{fidelity_up_to_phase, prepare_a_state, PureState, Qubit, WireMap};

pub use num_complex::Complex64 as C64;

/// Hard cap on register width. Dense vectors only.
pub const MAX_WIRES: usize = 14;

/// Tolerance for algebraic identities (matrix equalities, norms).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Fidelity threshold slack for composed circuits.
pub const CIRCUIT_TOL: f64 = 1e-10;

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
