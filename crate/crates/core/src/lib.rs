//! mzlab is a configurable-precision laboratory for two- and three-parameter
//! multiple zeta-type series: nested sums over weakly or strictly increasing
//! integer variables with per-position weights `1/((m+α)^a (m+β)^b (m+γ)^c)`
//! and Pochhammer boundary decorations. It evaluates the series to a
//! requested tolerance via a checkpointed forward sweep plus algebraic-tail
//! extrapolation, and verifies the identity families they satisfy (cyclic sum
//! formulas, sum formula, duality, derivative-generated relations, a
//! three-parameter relation) over parameter grids.
//!
//! Layout:
//! - [`index`]: index combinatorics (cyclic shifts, cyclic-sum term lists,
//!   constrained compositions)
//! - [`scalar`]: the backend-generic scalar contract with a 256-bit default
//!   float backend and an exact rational backend
//! - [`pochhammer`]: rising-factorial ratio tables
//! - [`accel`]: tail extrapolation of checkpointed partial sums
//! - [`series`]: the generic series evaluator and the named series builders
//! - [`aux`]: the coupled auxiliary series behind the cyclic sum formula
//! - [`deriv`]: finite-difference oracle and closed-form derivative expansions
//! - [`relations`]: identity verifiers producing [`RelationReport`]s
//! - [`report`]: machine-readable report documents (JSON, CSV)
//! - [`suite`]: suite configuration and the batch runner

pub mod accel;
pub mod aux;
pub mod deriv;
pub mod error;
pub mod index;
pub mod pochhammer;
pub mod relations;
pub mod report;
pub mod scalar;
pub mod series;
pub mod suite;

pub use accel::{accelerate, Extrapolation};
pub use error::Error;
pub use index::{compositions, csf_lhs_terms, csf_rhs_terms, weak_compositions, Index};
pub use pochhammer::{build_pochhammer, PochhammerTables};
pub use report::{RelationReport, ReportDocument};
pub use scalar::{Rat, Real, Scalar};
pub use series::{
    eval_dp, eval_naive, spec_z3_single, spec_z_i, spec_z_ii, spec_z_single, spec_zr,
    spec_zstar_i, spec_zstar_i3, Decoration, EvalOptions, EvalResult, Link, ParamPoint,
    Position, SeriesSpec,
};

/// Library version reported in documents and over FFI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
