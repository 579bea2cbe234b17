//! Numerical toolkit for measuring how fast functions settle down at infinity.
//!
//! The central objects are *exhausted spaces* — finite samples of a space
//! carrying an exhaustion height `h ≥ 0` that says how far out each point
//! sits — together with admissible weights `φ` and the weighted sup norms
//! `sup φ(h)·|f − c|`. On top of those sit tail functionals, shell-based
//! limsup estimates, critical-rate classification, Orlicz/Luxemburg gauges,
//! and the anisotropic (multi-end) versions of all of the above.

pub mod error;
pub mod expr;
pub mod io;
pub mod multiend;
pub mod norms;
pub mod rates;
pub mod report;
pub mod space;
pub mod weights;

pub use error::Error;

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
