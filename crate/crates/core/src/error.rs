use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("reality identity fails in component {component} at monomial {monomial}")]
    RealityViolation { component: usize, monomial: String },
    #[error("component {component} has a nonzero constant term")]
    NonzeroConstant { component: usize },
    #[error("component {component} may not depend on `{var}`")]
    ForbiddenVariable { component: usize, var: String },
    #[error("defining function has a nonzero differential at the origin")]
    SingularInput,
    #[error("point does not lie on the manifold")]
    OffManifold,
    #[error("operation needs a hypersurface (d = 1), got d = {0}")]
    NotAHypersurface(usize),
    #[error("wrong dimensions: {0}")]
    WrongDimensions(String),
    #[error("no witness point found after {attempts} attempts")]
    WitnessNotFound { attempts: usize },
    #[error("initial rank {rank} at the origin is below {expected}")]
    RankAssumptionViolated { rank: usize, expected: usize },
    #[error("unsupported basepoint: {0}")]
    UnsupportedBasepoint(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
