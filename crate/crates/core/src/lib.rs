//! Truncated Fock-space simulation of weak-force detection.
//!
//! The crate models one or more harmonic oscillator modes in a finite number
//! basis and evaluates how well nonclassical probe states (squeezed, pair
//! coherent, superposed coherent "cat" states) resolve a small displacement
//! of the momentum quadrature `Y = -i(a - a†)`.
//!
//! Layers, bottom up:
//!
//! * [`numerics`]: special functions and dense complex matrix kernels.
//! * [`fock`]: state containers, mode operators, tensor-product machinery.
//! * [`states`]: constructors for every probe family.
//! * [`metrology`]: signal/variance analysis, minimum detectable force,
//!   generator-variance bounds, and the collective-spin comparison.
//! * [`sampling`]: seeded Monte Carlo readout (parity and homodyne).
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line live in the `fockforce` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod fock;
pub mod metrology;
pub mod numerics;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
