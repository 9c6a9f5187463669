//! Three-point (second-order centered) finite-difference scheme for the 1D
//! acoustic wave equation `u_tt - c² u_xx = s`, together with the machinery
//! needed to check it numerically: exact-solution oracles, discrete energy
//! identities, truncation and convergence errors, and refinement studies.
//!
//! Module map:
//!
//! - [`seqspace`]: finite-support sequences over ℤ, dot products, `A_h`.
//! - [`continuous`]: Cauchy problems, manufactured solutions, d'Alembert oracle.
//! - [`scheme`]: grid, CFL predicate, the time-stepper and its support cone.
//! - [`energy`]: discrete energy, increment identity, lower/upper bounds.
//! - [`analysis`]: error fields, refinement studies, nonzero-count bound.
//! - [`trials`]: seeded random instances for property checks.
//! - [`cli`]: config loading, experiments and CSV output.

pub mod analysis;
pub mod cli;
pub mod continuous;
pub mod energy;
mod error;
pub mod exec;
pub mod quadrature;
pub mod scheme;
pub mod seqspace;
pub mod trials;

pub use error::{Error, Result};
