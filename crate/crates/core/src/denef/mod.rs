//! Local Fourier transforms at the trivial character.
//!
//! Residue-class computations on `P^{p-1}(F_v)`, the general stratified
//! formula for `h_v(0; s)`, the volume at infinity, and the assembled
//! leading constant of the point count.

mod constant;
mod general;
mod histogram;

use thiserror::Error;

pub use constant::{infinite_local_volume, leading_constant, ConstantReport};
pub use general::{denef_exact, denef_general, BoundaryIndex, Stratum, StratumData, StratumWeight};
pub use histogram::{
    check_bijection, local_density, residue_norm_bijection, valuation_histogram, DensityMethod,
    ValuationHistogram,
};

/// Default cap on enumerated residue classes.
pub const DEFAULT_CLASS_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenefError {
    #[error("{needed} residue classes exceed the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("the place at infinity has no residue-class enumeration here")]
    InfinitePlace,
    #[error("geometric factor of boundary index {0} has a pole at this s")]
    FactorPole(usize),
    #[error("expected {expected} exponents, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("invalid stratum data: {0}")]
    InvalidStrata(String),
}
