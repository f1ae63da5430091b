//! One-dimensional finite-volume solvers for hyperbolic balance laws with
//! stiff relaxation sources.
//!
//! The crate provides two semi-implicit one-step compact schemes (a
//! trapezoidal and a stiffly decaying Taylor source treatment), an
//! a-posteriori order-adaptation wrapper that locally falls back to a
//! robust first-order scheme, a two-stage semi-implicit Runge-Kutta
//! comparison scheme, von Neumann amplification tooling, and a test-case
//! harness with convergence studies, cached reference solutions, and CSV
//! reporting.

// Negated float comparisons throughout are deliberate: NaN must land on
// the failing branch. Index loops mirror the stencil notation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cat2;
pub mod config;
pub mod csvio;
pub mod error;
pub mod grid;
pub mod harness;
pub mod imex;
pub mod models;
pub mod mood;
pub mod scheme;
pub mod selfcheck;
pub mod stability;
pub mod state;

pub use error::{
    ConfigError, CsvError, GridError, HarnessError, ModelError, StabilityError, StepError,
};
pub use grid::{BoundaryKind, CellField, Grid};
pub use scheme::{SchemeKind, SchemeSpec};
pub use state::StateVec;
