//! Unique-solvability certificates for absolute value matrix equations.
//!
//! Four equation classes are covered:
//!
//! - GAVE: `Ax + B|x| = f`
//! - GAVME: `AX + B|X| = F`
//! - NGAVME: `AX + B|CX| = F`
//! - Sylvester-like: `AXK + B|X|L = F`
//!
//! [`certify`] and [`combinat`] evaluate the sufficient conditions,
//! [`solve`] holds the fixed-point solvers and the sign-pattern
//! enumeration oracle, and [`harness`] generates random instances and
//! compares condition strength.

pub mod certify;
pub mod combinat;
pub mod error;
pub mod harness;
pub mod instances;
pub mod matcore;
pub mod solve;

pub use error::{Error, Result};
pub use matcore::{Matrix, Vector};
