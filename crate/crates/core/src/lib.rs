//! Exact finite-field machinery for studying arithmetic progressions whose
//! common difference is restricted to a prescribed set.
//!
//! The crate has three layers:
//!
//! * **Algebra** — exact linear algebra over a prime field ([`field`],
//!   [`subspace`]) and symmetric bilinear/quadratic forms with their Gauss
//!   sums and Veronese coordinates ([`forms`]).
//! * **Counting** — progression counts, dual functions, and discrete Fourier
//!   decompositions over intervals, cyclic groups, and vector spaces
//!   ([`progressions`]), plus an adversarial construction that pins a
//!   quadric through a sampled difference set ([`adversary`]).
//! * **Experiments** — random difference-set models and concentration
//!   measurements for their centered indicators ([`models`]), with
//!   deterministic seed derivation ([`seeds`]) and data-parallel helpers
//!   ([`exec`]) that produce bit-identical output at any worker count.
//!
//! Everything that feeds a decision (rank, solvability, densities, dual
//! values, tail bounds) is computed in exact integer or rational arithmetic;
//! floating point appears only in final magnitudes, spectra, and report
//! formatting.

pub mod adversary;
pub mod bitset;
pub mod budget;
pub mod error;
pub mod exec;
pub mod field;
pub mod forms;
pub mod models;
pub mod progressions;
pub mod seeds;
pub mod stats;
pub mod subspace;

pub use budget::EnumerationBudget;
pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
