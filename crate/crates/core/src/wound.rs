//! The wound group `G = Res_{F^{1/p}/F} G_m / G_m` inside `P^{p-1}`.
//!
//! A rational point is a class of `alpha = x_0 + x_1 u + ... + x_{p-1} u^{p-1}`
//! in `(F^{1/p})^x / F^x` with `u = t^{1/p}`. Since `alpha^p = sum t^i x_i^p`
//! lies in `F`, the norm form `f(x) = sum t^i x_i^p` cuts out the boundary and
//! the anticanonical height of a primitive representative is `q^{deg f(x)}`.
//!
//! Points are stored as canonical representatives: primitive integral tuples
//! whose least-index nonzero coordinate is monic.

use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::polyfield::{places_dividing, Place, Poly, PolyError, PolyRing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WoundError {
    #[error("expected {expected} coordinates, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("all coordinates are zero")]
    AllZero,
    #[error("norm form vanishes: the point lies on the boundary divisor")]
    BoundaryPoint,
    #[error("only the degree-p extension (tower exponent 1) is implemented, got {0}")]
    UnsupportedTower(u32),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A canonical representative of a class in `G(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupPoint {
    coords: Vec<Poly>,
    norm: Poly,
}

impl GroupPoint {
    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    /// The cached norm form `f(x)`.
    pub fn norm(&self) -> &Poly {
        &self.norm
    }

    /// Height exponent `M` with `H(x) = q^M`.
    pub fn height(&self) -> u32 {
        self.norm.degree().expect("norm of a group point is nonzero") as u32
    }
}

/// `||f(x)||_v = q_v^{-exponent}` at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricValue {
    pub place: Place,
    pub exponent: u32,
}

/// The group together with its coefficient ring.
#[derive(Clone, Debug)]
pub struct WoundGroup {
    ring: PolyRing,
    p: usize,
}

impl WoundGroup {
    pub fn new(field: Arc<Field>) -> WoundGroup {
        let p = field.characteristic() as usize;
        WoundGroup {
            ring: PolyRing::new(field),
            p,
        }
    }

    /// `Res_{F^{1/p^k}/F} G_m / G_m`; only `k = 1` is available.
    pub fn with_tower_exponent(field: Arc<Field>, k: u32) -> Result<WoundGroup, WoundError> {
        if k != 1 {
            return Err(WoundError::UnsupportedTower(k));
        }
        Ok(WoundGroup::new(field))
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn field(&self) -> &Arc<Field> {
        self.ring.field()
    }

    /// Number of coordinates, the characteristic.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.ring.q()
    }

    /// `f(x) = sum_i t^i x_i^p`.
    pub fn norm_form(&self, coords: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, x) in coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            out = self.ring.add(&out, &self.ring.frobenius_power(x).shift(i));
        }
        out
    }

    /// Canonicalizes an arbitrary nonzero tuple.
    pub fn make_point(&self, coords: Vec<Poly>) -> Result<GroupPoint, WoundError> {
        if coords.len() != self.p {
            return Err(WoundError::WrongArity {
                expected: self.p,
                got: coords.len(),
            });
        }
        let content = self.ring.content(&coords);
        if content.is_zero() {
            return Err(WoundError::AllZero);
        }
        let mut coords = if content.degree() == Some(0) {
            coords
        } else {
            coords
                .iter()
                .map(|x| self.ring.div_exact(x, &content))
                .collect::<Result<Vec<_>, _>>()?
        };
        let lead = coords
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.leading())
            .expect("nonzero content");
        if lead != Elem::ONE {
            let inv = self.field().inv(lead).expect("nonzero");
            for x in coords.iter_mut() {
                *x = self.ring.scale(x, inv);
            }
        }
        let norm = self.norm_form(&coords);
        if norm.is_zero() {
            return Err(WoundError::BoundaryPoint);
        }
        Ok(GroupPoint { coords, norm })
    }

    /// Builds a point from small-integer coefficient lists (prime-field images).
    pub fn point_from_ints(&self, coords: &[&[i64]]) -> Result<GroupPoint, WoundError> {
        self.make_point(coords.iter().map(|c| self.ring.from_ints(c)).collect())
    }

    pub(crate) fn from_canonical_unchecked(&self, coords: Vec<Poly>) -> GroupPoint {
        let norm = self.norm_form(&coords);
        GroupPoint { coords, norm }
    }

    pub fn identity(&self) -> GroupPoint {
        let mut coords = vec![Poly::zero(); self.p];
        coords[0] = Poly::one();
        GroupPoint {
            coords,
            norm: Poly::one(),
        }
    }

    /// `alpha` as a polynomial in `u`: the `u^{pk+i}` coefficient is the
    /// `t^k` coefficient of `x_i`.
    fn to_u_poly(&self, coords: &[Poly]) -> Poly {
        let len = coords
            .iter()
            .enumerate()
            .filter_map(|(i, x)| x.degree().map(|d| d * self.p + i + 1))
            .max()
            .unwrap_or(0);
        let mut out = vec![Elem::ZERO; len];
        for (i, x) in coords.iter().enumerate() {
            for (k, &c) in x.coeffs().iter().enumerate() {
                out[k * self.p + i] = c;
            }
        }
        Poly::from_coeffs(out)
    }

    fn from_u_poly(&self, alpha: &Poly) -> Vec<Poly> {
        let mut coords = vec![Vec::new(); self.p];
        for (n, &c) in alpha.coeffs().iter().enumerate() {
            let (k, i) = (n / self.p, n % self.p);
            let slot = &mut coords[i];
            if slot.len() <= k {
                slot.resize(k + 1, Elem::ZERO);
            }
            slot[k] = c;
        }
        coords.into_iter().map(Poly::from_coeffs).collect()
    }

    /// Product in `(F^{1/p})^x / F^x`: multiply in `F_q[u]`, then canonicalize.
    pub fn mul(&self, a: &GroupPoint, b: &GroupPoint) -> GroupPoint {
        let prod = self.ring.mul(&self.to_u_poly(&a.coords), &self.to_u_poly(&b.coords));
        self.make_point(self.from_u_poly(&prod))
            .expect("product of units is a unit")
    }

    /// Inverse via `alpha^{-1} = alpha^{p-1} / f(a)`, with `f(a) in F^x`.
    pub fn inv(&self, a: &GroupPoint) -> GroupPoint {
        let alpha = self.to_u_poly(&a.coords);
        let power = self.ring.pow(&alpha, self.p as u64 - 1);
        self.make_point(self.from_u_poly(&power))
            .expect("power of a unit is a unit")
    }

    pub fn pow(&self, a: &GroupPoint, n: u64) -> GroupPoint {
        let alpha = self.to_u_poly(&a.coords);
        let power = self.ring.pow(&alpha, n);
        self.make_point(self.from_u_poly(&power))
            .expect("power of a unit is a unit")
    }

    /// `||f(x)||_v` on the primitive representative. At infinity the metric
    /// is normalized so that `||f(x)||_inf = 1`.
    pub fn local_metric(&self, v: &Place, x: &GroupPoint) -> MetricValue {
        let exponent = match v.pi() {
            None => 0,
            Some(pi) => self.ring.valuation(&x.norm, pi).expect("nonzero norm"),
        };
        MetricValue {
            place: v.clone(),
            exponent,
        }
    }

    /// Height exponent from `deg f(x)`.
    pub fn height(&self, x: &GroupPoint) -> u32 {
        x.height()
    }

    /// Height exponent from the definition `H = prod_v ||f(x)||_v^{-1}`:
    /// the sum of `d_v * m_v` over the finite places dividing `f(x)`. The
    /// table must contain every finite place of degree `<= M / 2`.
    pub fn height_by_places(&self, x: &GroupPoint, places: &[Place]) -> Result<u32, WoundError> {
        let mut total = 0;
        for (v, _) in places_dividing(&self.ring, &x.norm, places)? {
            let m = self.local_metric(&v, x);
            total += v.degree() * m.exponent;
        }
        Ok(total)
    }

    /// Serializable view: a list of `p` coefficient lists, each coefficient a
    /// coordinate tuple.
    pub fn point_json(&self, x: &GroupPoint) -> PointJson {
        PointJson(x.coords.iter().map(|c| self.ring.coords(c)).collect())
    }

    /// Human-readable `(x_0, ..., x_{p-1})`.
    pub fn format_point(&self, x: &GroupPoint) -> String {
        let parts: Vec<String> = x.coords.iter().map(|c| self.ring.format(c)).collect();
        format!("({})", parts.join(", "))
    }
}

pub struct PointJson(pub Vec<Vec<Vec<u32>>>);

impl Serialize for PointJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}
