//! Numerical toolkit for discrete adiabatic passage along the quasienergies
//! of rank-1-kicked Floquet operators.
//!
//! The crate builds kicked one-period unitaries `U_s = exp(-i H0 T) *
//! exp(-i s |v><v|)`, tracks their eigenangle curves across the kick
//! strength `s` (including the anholonomy that shifts every level up by one
//! slot per 2pi of `s`), runs discrete adiabatic passages under linear or
//! gap-adapted schedules, analyzes the Grover-search gap structure for
//! different kick vectors, and assembles clock-register Hamiltonians that
//! let the same passage machinery simulate a gate circuit.
//!
//! Modules mirror the layering: [`numerics`] (dense complex linear algebra),
//! [`floquet`] (operator construction), [`spectral`] (eigenangle curve
//! continuation and gaps), [`passage`] (schedules and running times),
//! [`models`] (two-level, Grover, and composed systems), and [`clocksim`]
//! (the clock-register circuit construction).

pub mod clocksim;
pub mod error;
pub mod floquet;
pub mod models;
pub mod numerics;
pub mod passage;
pub mod spectral;

pub use error::{Error, Result};
pub use floquet::{FloquetMap, FloquetSystem};
pub use numerics::{CMatrix, CVector, EigenDecomposition};
