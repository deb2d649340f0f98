//! Exact arithmetic over `Q(i)`: sparse polynomials and truncated power
//! series, maps between variable spaces, vector fields and generic ranks.

mod field;
mod gaussian;
mod map;
mod parse;
pub mod rank;
mod series;
mod varspace;

pub use field::VectorField;
pub use gaussian::GaussianRational;
pub use map::SeriesMap;
pub use parse::parse_series;
pub use rank::{generic_rank, RankResult};
pub use series::{degree, grlex, series_arith, ArithOp, Monomial, Order, Series};
pub use varspace::{Block, Role, VarSpace, VarSpaceBuilder};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operands live over different variable spaces")]
    VarSpaceMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("nonzero constant substituted for `{0}` in a truncated series")]
    TruncationUnsound(String),
    #[error("variable `{0}` has no conjugate partner")]
    UnpairedVariable(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector fields act on different coordinates")]
    ChartMismatch,
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
}
