//! Numerical quaternionic-contact (qc) sub-Riemannian geometry.
//!
//! The crate works along a single geodesic of a qc manifold of dimension
//! `4n + 3`, `n >= 2`, expressed entirely in Fermi-normalized components:
//! the horizontal space is `R^{4n}` with the standard inner product and a
//! triple of almost-complex structures `I1, I2, I3` satisfying the quaternion
//! relations, while the vertical directions appear only through the index
//! `alpha = 1, 2, 3`.
//!
//! Modules:
//!
//! * [`qc_algebra`] — quaternionic structures on `R^{4n}`, fundamental
//!   2-forms, Casimir decomposition.
//! * [`qc_model`] — constant-tensor models `(T0, U, S)` and the curvature
//!   contractions built from them (Ricci, sectional sums, Bonnet-Myers form).
//! * [`extremal_flow`] — normal extremals of the sub-Riemannian Hamiltonian
//!   in momentum components `(u, v)`, plus the quaternionic Heisenberg
//!   exponential map in group coordinates.
//! * [`canonical_frame`] — structural matrices along an extremal, symplectic
//!   products of the Hamiltonian frame, the canonical Darboux frame
//!   `(O, Y, W)` and the curvature block `R_cc`.
//! * [`comparison`] — Bonnet-Myers reports (`kappa`, diameter bound) and
//!   conjugate-point detection on the flat model.
//! * [`verify`] — named residual suites driven by the CLI and the acceptance
//!   tests.

pub mod canonical_frame;
pub mod comparison;
mod error;
pub mod extremal_flow;
pub mod qc_algebra;
pub mod qc_model;
mod report;
pub mod rk4;
pub mod verify;

pub use error::QcError;
pub use report::{ResidualCheck, ValidationReport};
