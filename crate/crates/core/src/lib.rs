//! Instantaneous-eigenstate population tracking for time-dependent
//! non-self-adjoint two-level Hamiltonians.
//!
//! The crate propagates `i/T dψ/ds = H(w(s), z(s)) ψ` on the reduced time
//! `s ∈ [0, 1]` and decomposes the wavefunction on the instantaneous
//! biorthogonal eigenbasis under three conventions:
//!
//! * `c`: plain biorthogonal projection, which depends on the arbitrary
//!   normalization of the eigenvectors;
//! * `d`: projection corrected by the exponentials of the integrated
//!   geometric phase generators `A_aa`, invariant under renormalization;
//! * `e`: c-product normalized basis, only available for complex-symmetric
//!   Hamiltonians, where it coincides with `d`.
//!
//! Module map: [`model`] (Hamiltonian and parameter paths), [`spectral`]
//! (closed-form eigensystem and branch tracking), [`geometry`] (phase
//! generators, gauges, the η metric, holonomy), [`propagator`] (RK4),
//! [`tracking`] (population conventions and diagnostics), [`scenarios`]
//! (builtin experiments, sweeps), [`output`] and [`cli`].

pub mod check;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod output;
pub mod propagator;
pub mod scenarios;
pub mod spectral;
pub mod tracking;

pub use error::{Error, Result};
pub use linalg::{Mat2, Vec2, C64};
pub use model::{ComplexPair, ParameterPath, PathShape};
pub use spectral::EigenFrame;
