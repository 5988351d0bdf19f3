//! Relational time on a discretized clock: history states, the constraint
//! operator, clock-frequency transforms and the Weyl-pair test cases.
//!
//! `no_std` with `alloc`. File formats and the command line live in the
//! `relclock` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bandwidth;
pub mod error;
pub mod fft;
pub mod grid;
pub mod history;
pub mod system;
pub mod weyl;

pub use error::{Error, Result};
pub use grid::{ClockVector, TimeGrid};
pub use history::{build_history, condition, ConstraintOperator, HistoryState};
pub use num_complex::Complex64 as C64;
pub use system::{Hamiltonian, HamiltonianSpec, SystemState};
