//! Exact computation of the span of double zeta values in positive
//! characteristic.
//!
//! Over the rational function field k = F_q(θ), the library constructs
//! special points in tensor powers of the Carlitz module attached to each
//! depth-two index (s1, s2), finds all F_q[t]-linear relations among them
//! with an exact small-coefficient solver, and converts the resulting ranks
//! into the dimension of the span of weight-n double zeta values together
//! with the n-th power of the Carlitz period. Every discovered relation is
//! re-verified both exactly (under the module action) and numerically
//! (against truncated Laurent evaluations of the zeta sums).

pub mod algebra;
pub mod carlitz;
pub mod fmodule;
pub mod numeric;
pub mod chen;
pub mod pipeline;
pub mod siegel;
pub mod error;

pub use error::{
    AlgebraError, CarlitzError, ModuleError, NumericError, PipelineError, SolveError,
};
