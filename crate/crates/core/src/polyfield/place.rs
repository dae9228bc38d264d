use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Poly, PolyError, PolyRing};
use crate::gf::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    /// A monic irreducible polynomial.
    Finite(Poly),
    /// The degree valuation, uniformizer `1/t`.
    Infinity,
}

/// A place of `F_q(t)` together with its residue cardinality `q_v`.
#[derive(Clone, Debug)]
pub struct Place {
    kind: PlaceKind,
    degree: u32,
    q_v: u64,
    field: Arc<Field>,
}

impl PartialEq for Place {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && *self.field == *other.field
    }
}

impl Eq for Place {}

impl Place {
    pub fn infinity(ring: &PolyRing) -> Place {
        Place {
            kind: PlaceKind::Infinity,
            degree: 1,
            q_v: ring.q(),
            field: Arc::clone(ring.field()),
        }
    }

    /// Finite place for a monic irreducible polynomial.
    pub fn finite(ring: &PolyRing, pi: Poly) -> Result<Place, PolyError> {
        if !pi.is_monic() || !ring.is_irreducible(&pi)? {
            return Err(PolyError::NotAPlace(ring.format(&pi)));
        }
        Ok(Place::finite_unchecked(ring, pi))
    }

    pub(crate) fn finite_unchecked(ring: &PolyRing, pi: Poly) -> Place {
        let degree = pi.degree().expect("nonconstant") as u32;
        Place {
            kind: PlaceKind::Finite(pi),
            degree,
            q_v: ring.q().pow(degree),
            field: Arc::clone(ring.field()),
        }
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == PlaceKind::Infinity
    }

    /// The place polynomial, `None` at infinity.
    pub fn pi(&self) -> Option<&Poly> {
        match &self.kind {
            PlaceKind::Finite(pi) => Some(pi),
            PlaceKind::Infinity => None,
        }
    }

    /// `d_v`; the place at infinity has degree 1.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn q_v(&self) -> u64 {
        self.q_v
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Valuation of a nonzero polynomial.
    pub fn valuation_poly(&self, f: &Poly) -> Result<i64, PolyError> {
        let ring = PolyRing::new(Arc::clone(&self.field));
        match &self.kind {
            PlaceKind::Finite(pi) => ring
                .valuation(f, pi)
                .map(i64::from)
                .ok_or(PolyError::ZeroValuation),
            PlaceKind::Infinity => f
                .degree()
                .map(|d| -(d as i64))
                .ok_or(PolyError::ZeroValuation),
        }
    }

    pub fn valuation(&self, f: &RationalFunction) -> Result<i64, PolyError> {
        Ok(self.valuation_poly(&f.num)? - self.valuation_poly(&f.den)?)
    }

    /// `|f|_v = q_v^{-v(f)}`, exactly.
    pub fn abs_value(&self, f: &RationalFunction) -> Result<BigRational, PolyError> {
        let v = self.valuation(f)?;
        let base = BigRational::from_integer(BigInt::from(self.q_v));
        Ok(if v >= 0 {
            num_traits::pow(base, v as usize).recip()
        } else {
            num_traits::pow(base, (-v) as usize)
        })
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Infinity => write!(f, "inf"),
            PlaceKind::Finite(pi) => {
                let ring = PolyRing::new(Arc::clone(&self.field));
                write!(f, "{}", ring.format(pi))
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.kind {
            PlaceKind::Infinity => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("kind", "infinity")?;
                m.end()
            }
            PlaceKind::Finite(pi) => {
                let ring = PolyRing::new(Arc::clone(&self.field));
                let mut m = serializer.serialize_map(Some(2))?;
                m.serialize_entry("kind", "finite")?;
                m.serialize_entry("pi", &ring.coords(pi))?;
                m.end()
            }
        }
    }
}

/// Reduced quotient `num/den` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(ring: &PolyRing, num: &Poly, den: &Poly) -> Result<RationalFunction, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let g = ring.gcd(num, den);
        let mut num = ring.div_exact(num, &g)?;
        let mut den = ring.div_exact(den, &g)?;
        let lead = ring.field().inv(den.leading()).expect("nonzero");
        num = ring.scale(&num, lead);
        den = ring.scale(&den, lead);
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(f: Poly) -> RationalFunction {
        RationalFunction {
            num: f,
            den: Poly::one(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `d` over `F_q`:
/// `(1/d) sum_{e | d} mu(d/e) q^e`.
pub fn necklace_count(q: u64, d: u32) -> u64 {
    let d64 = d as u64;
    let total: i128 = (1..=d64)
        .filter(|e| d64 % e == 0)
        .map(|e| mobius(d64 / e) as i128 * (q as i128).pow(e as u32))
        .sum();
    (total / d as i128) as u64
}

/// Monic irreducibles of exact degree `d`, in lexicographic order.
pub fn irreducibles_of_degree(ring: &PolyRing, d: usize) -> Vec<Poly> {
    let count = ring.q().pow(d as u32);
    (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let f = ring.monic_from_index(d, idx);
            ring.is_irreducible(&f).ok()?.then_some(f)
        })
        .collect()
}

/// The place at infinity followed by every finite place of degree `<= max_degree`,
/// sorted by degree and then lexicographically.
pub fn places_up_to(ring: &PolyRing, max_degree: u32) -> Vec<Place> {
    let mut out = vec![Place::infinity(ring)];
    for d in 1..=max_degree as usize {
        out.extend(
            irreducibles_of_degree(ring, d)
                .into_iter()
                .map(|pi| Place::finite_unchecked(ring, pi)),
        );
    }
    out
}

/// Product of `|f|_v` over the given places. With every place dividing the
/// numerator or denominator plus infinity this equals 1.
pub fn product_of_abs_values(
    places: &[Place],
    f: &RationalFunction,
) -> Result<BigRational, PolyError> {
    places
        .iter()
        .try_fold(BigRational::one(), |acc, v| Ok(acc * v.abs_value(f)?))
}

/// Finite places dividing `f`, found by trial division against `places`
/// (which must contain every place of degree `<= deg f / 2`), with the
/// cofactor left at the end promoted to a place.
pub fn places_dividing(
    ring: &PolyRing,
    f: &Poly,
    places: &[Place],
) -> Result<Vec<(Place, u32)>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroValuation);
    }
    let mut rest = ring.monic(f);
    let mut found = Vec::new();
    let covered = places
        .iter()
        .filter(|v| !v.is_infinite())
        .map(|v| v.degree())
        .max()
        .unwrap_or(0);
    for v in places.iter().filter(|v| !v.is_infinite()) {
        let d = rest.degree().unwrap_or(0) as u32;
        if 2 * v.degree() > d {
            break;
        }
        let pi = v.pi().expect("finite");
        let mut k = 0;
        loop {
            let (q, r) = ring.divmod(&rest, pi)?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            found.push((v.clone(), k));
        }
    }
    let d = rest.degree().unwrap_or(0) as u32;
    if d > 0 {
        if covered < d / 2 {
            return Err(PolyError::InsufficientPlaces(d / 2));
        }
        let v = Place::finite_unchecked(ring, rest);
        found.push((v, 1));
    }
    Ok(found)
}

/// Serializable `{degree: count}` summary.
pub struct PlaceCounts(pub Vec<(u32, u64)>);

impl Serialize for PlaceCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(self.0.len()))?;
        for (d, n) in &self.0 {
            m.serialize_entry(&d.to_string(), n)?;
        }
        m.end()
    }
}
