//! Exact arithmetic foundations: finite fields, dense polynomials in one
//! and two variables, rational functions, truncated Laurent series, and
//! exact linear algebra.

pub mod bipoly;
pub mod fq;
pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod ratfunc;

pub use bipoly::BiPoly;
pub use fq::{Fq, FqElem};
pub use laurent::{LaurentSeries, INF_PREC};
pub use linalg::{clear_denominators, fq_nullspace, remove_content, PolyMatrix};
pub use poly::{Coeff, CoeffField, FqPoly, UniPoly, Var};
pub use ratfunc::RatFunc;
