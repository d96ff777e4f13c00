//! Simulation and verification harness for blind delegated quantum
//! computation built on quantum one-time-pad encryption.
//!
//! The client (Alice) encrypts every qubit she sends with random Pauli keys
//! and tracks how those keys evolve through the server's gates. Non-Clifford
//! phase gates `A(n) = diag(1, e^{inπ/4})` are never executed by the server
//! (Bob); they are teleported in from resource states Alice prepares, with a
//! two-round correction cascade. Two compilers hide the computation:
//! [`compile::compile_weak_blind`] leaks circuit size and CNOT positions,
//! [`compile::compile_blind`] leaks only circuit size by routing every
//! two-qubit interaction through fixed-shape CZ bricks.

pub mod audit;
pub mod cli;
pub mod compile;
pub mod engine;
pub mod error;
pub mod frame;
pub mod gadget;
pub mod simcore;
pub mod verify;

pub use error::{Error, Result};
