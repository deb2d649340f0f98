//! Segre chains, rank invariants and bracket computations for real-analytic
//! CR-generic manifolds given in graph form, in exact arithmetic.

pub mod algebra;
pub mod error;
pub mod invariants;
pub mod lie;
pub mod orbit;
pub mod chains;
pub mod manifold;

pub use error::{Error, Result};
