//! Numerical verification kernel for noncanonical harmonic-oscillator
//! constructions.
//!
//! The crate builds truncated matrix representations of oscillator algebras
//! and mechanically checks the operator identities those constructions are
//! supposed to satisfy:
//!
//! * [`matrix`] / [`eigh`] / [`report`] — dense complex operator matrices,
//!   a deterministic Hermitian eigensolver, and the report type every
//!   identity check emits.
//! * [`fock`] — truncated Fock bases (one axis, and the three-axis graded
//!   basis), ladder and canonical operators, interior projectors that cut
//!   away truncation artifacts.
//! * [`clifford`] — Pauli and Dirac matrices, spin operators, and involution
//!   ("eta") representations of the flat-metric bracket.
//! * [`susy1d`] / [`susy3d`] / [`pairing`] — supersymmetric oscillator
//!   bundles on C^2 (x) Fock and C^4 (x) Fock3, their identity suites,
//!   spectra, and the degeneracy-pairing check.
//! * [`lie`] — the deformed oscillator Lie algebra: structure constants,
//!   Jacobi closure, Killing form and its signature classification, and the
//!   exact symbolic derivation of the deformation coefficients.
//! * [`symfun`] / [`gauge`] — an exact symbolic function family closed under
//!   differentiation, matrix differential operators built from it, field
//!   strength commutators, and the quadratic wave-equation reduction.
//! * [`radial`] — the radial Schroedinger eigensolver for Coulomb-plus-linear
//!   potentials with closed-form oracles and Richardson error estimates.
//!
//! All tolerances are relative to the max-norm of the operators involved;
//! every identity check reports a measured residual rather than a bare flag.

pub mod clifford;
pub mod eigh;
pub mod error;
pub mod fock;
pub mod gauge;
pub mod lie;
pub mod matrix;
pub mod pairing;
pub mod radial;
pub mod report;
pub mod susy1d;
pub mod susy3d;
pub mod symfun;
pub mod units;

pub use error::CoreError;
pub use matrix::OperatorMatrix;
pub use report::VerificationReport;
pub use units::UnitSystem;
