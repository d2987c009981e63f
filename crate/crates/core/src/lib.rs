//! Zeroth-order dressed-electron QED numerics.
//!
//! The crate computes the coherent photon cloud carried by an electron when
//! the current is replaced by a commuting c-number amplitude, together with
//! the observables that follow from it:
//!
//! * [`specfun`]: the MacDonald function `K0`, its cumulative integral, and
//!   the adaptive / oscillatory quadrature every other module leans on.
//! * [`spinor`]: Dirac bispinors, current matrix elements and photon
//!   polarization bases.
//! * [`coherent`]: the self-consistent current amplitude, coherent
//!   amplitudes `Q`, phases and cloud summaries.
//! * [`meanfield`]: the regularized scalar potential, self-energy, magnetic
//!   moment field and moving-charge potentials.
//! * [`infrared`]: the infrared-finite photon spectrum and its reaction
//!   shift.
//! * [`gbfock`]: the indefinite-metric scalar-photon Fock space on a finite
//!   truncation.
//! * [`audit`]: the record of conventions attached to every report.
//! * [`linalg`]: dense complex matrices, `expm`, and an RK4 stepper.
//!
//! Unless stated otherwise quantities are in units where the electron mass is
//! one (`hbar = c = 1`): momenta in `m`, lengths and times in `1/m`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod audit;
pub mod coherent;
mod error;
pub mod gbfock;
pub mod infrared;
pub mod linalg;
pub mod meanfield;
pub mod specfun;
pub mod spinor;
mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spinor::{FourVector, Spin, ThreeVector};
pub use units::{Electron, FINE_STRUCTURE};
