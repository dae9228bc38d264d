//! Polynomials over `F_q`, the places of `F = F_q(t)` with their valuations,
//! and the zeta function of `F`.

mod place;
mod poly;
mod zeta;

use thiserror::Error;

pub use place::{
    irreducibles_of_degree, necklace_count, places_dividing, places_up_to, product_of_abs_values,
    Place, PlaceCounts, PlaceKind, RationalFunction,
};
pub use poly::{Poly, PolyRing};
pub use zeta::{
    euler_product, euler_product_by_degree, ln_1p_complex, zeta_closed, zeta_finite_closed, zeta_residue,
    EulerProduct, TailModel,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial does not divide exactly")]
    NotDivisible,
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantInput,
    #[error("`{0}` is not a monic irreducible polynomial")]
    NotAPlace(String),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("zeta function evaluated at a pole")]
    Pole,
    #[error("tail decay exponent must be positive, got {0}")]
    BadTailModel(f64),
    #[error("place table must cover degree {0} to factor this polynomial")]
    InsufficientPlaces(u32),
}
