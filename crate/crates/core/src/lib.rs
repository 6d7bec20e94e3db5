//! Exact computer algebra and desk-scale numerics for the NLS/GP/KdV
//! integrable hierarchies.
//!
//! The symbolic half of the crate works over the Gaussian rationals:
//! - [`exact`]: arbitrary-precision rationals, Gaussian rationals,
//!   generalized binomial coefficients and Catalan numbers
//! - [`diffpoly`]: the differential polynomial ring in q, q̄ (and u),
//!   with derivation, variational derivatives and total-derivative tests
//! - [`projections`]: the derivative-counting projections and residual
//!   class membership checks
//! - [`coefficients`]: the closed-form coefficient families with their
//!   recurrence oracles
//! - [`genfun`]: truncated bivariate series and the registry of
//!   generating-function identities
//! - [`hierarchy`]: conserved densities, Hamiltonians, flows, structural
//!   decompositions and Poisson brackets
//!
//! The numerical half:
//! - [`scattering`]: Zakharov-Shabat direct scattering, transmission
//!   coefficients and asymptotic-expansion cross-checks
//! - [`evolve`]: pseudospectral evolution of the low flows with
//!   conservation monitoring, plus exact operator-symbol checks
//!
//! The [`cli`] module ties everything into reproducible command-line runs.

pub mod cli;
pub mod coefficients;
pub mod diffpoly;
pub mod evolve;
pub mod exact;
pub mod genfun;
pub mod hierarchy;
pub mod projections;
pub mod scattering;

pub use diffpoly::{DiffPoly, Var};
pub use exact::{GaussianRational, Rational};
