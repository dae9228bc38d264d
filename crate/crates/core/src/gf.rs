//! Finite fields `F_{p^e}` in fixed-modulus coordinates.
//!
//! An element is a coordinate vector `(c_0, ..., c_{e-1})` over `Z/pZ` with
//! respect to the power basis of a root of the modulus. The vector is packed
//! into a single integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` so elements are
//! `Copy` and index directly into lookup tables; the packing is a bijection
//! with the coordinate vector, not a discrete logarithm.
//!
//! The hot loops of the crate work with [`Field`] and bare [`Elem`] values.
//! [`FieldElement`] bundles an element with its field for callers who want
//! mixed-field operands to be rejected instead of silently misinterpreted.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::polyfield::{Poly, PolyRing};

/// Largest extension degree accepted by [`Field::new`].
pub const MAX_EXTENSION_DEGREE: u32 = 8;

/// Fields of at most this many elements cache full addition and
/// multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} outside 1..={max}", max = MAX_EXTENSION_DEGREE)]
    DegreeOutOfRange(u32),
    #[error("field of order {p}^{e} does not fit the element encoding")]
    TooLarge { p: u32, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields (F_{left} and F_{right})")]
    MixedFields { left: u32, right: u32 },
    #[error("coordinate {0} out of range for characteristic {1}")]
    BadCoordinate(u32, u32),
}

/// An element of some [`Field`], stored as packed base-`p` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// The packed index in `0..q`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The finite field `F_{p^e}`.
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    /// Low-degree-first coefficients of the monic modulus (length `e + 1`).
    /// For `e = 1` this is the polynomial `t`.
    modulus: Vec<u32>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl Field {
    /// Builds `F_{p^e}`. For `e > 1` the modulus is the least monic
    /// irreducible of degree `e` over `F_p`, ordering coefficient tuples from
    /// the `t^{e-1}` coefficient down to the constant term.
    pub fn new(p: u32, e: u32) -> Result<Arc<Field>, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if e == 0 || e > MAX_EXTENSION_DEGREE {
            return Err(GfError::DegreeOutOfRange(e));
        }
        let q = p
            .checked_pow(e)
            .filter(|q| *q <= 1 << 30)
            .ok_or(GfError::TooLarge { p, e })?;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, e)
        };
        let mut field = Field {
            p,
            e,
            q,
            modulus,
            add_table: None,
            mul_table: None,
        };
        if e > 1 && q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(Arc::new(field))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<Field>, GfError> {
        Field::new(p, 1)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..self.q {
            for b in 0..self.q {
                add[a as usize * q + b as usize] = self.add_slow(Elem(a), Elem(b)).0 as u16;
                mul[a as usize * q + b as usize] = self.mul_slow(Elem(a), Elem(b)).0 as u16;
            }
        }
        self.add_table = Some(add);
        self.mul_table = Some(mul);
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// The class of the modulus root (the generator `t` of the power basis).
    /// In a prime field this is `0`, the root of the placeholder modulus `t`.
    pub fn generator(&self) -> Elem {
        if self.e == 1 {
            Elem::ZERO
        } else {
            Elem(self.p)
        }
    }

    /// Element from its packed index; `None` when out of range.
    pub fn elem(&self, index: u32) -> Option<Elem> {
        (index < self.q).then_some(Elem(index))
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Elem, GfError> {
        let mut idx = 0u32;
        let mut scale = 1u32;
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.p {
                return Err(GfError::BadCoordinate(c, self.p));
            }
            if i as u32 >= self.e {
                if c != 0 {
                    return Err(GfError::BadCoordinate(c, self.p));
                }
                continue;
            }
            idx += c * scale;
            scale = scale.wrapping_mul(self.p);
        }
        Ok(Elem(idx))
    }

    /// Coordinate vector of length `e`.
    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut x = a.0;
        for _ in 0..self.e {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        if let Some(t) = &self.add_table {
            return Elem(t[(a.0 * self.q + b.0) as usize] as u32);
        }
        self.add_slow(a, b)
    }

    fn add_slow(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            out += ((x % self.p + y % self.p) % self.p) * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.e == 1 {
            return Elem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            let c = x % self.p;
            out += ((self.p - c) % self.p) * scale;
            x /= self.p;
            scale *= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        if let Some(t) = &self.mul_table {
            return Elem(t[(a.0 * self.q + b.0) as usize] as u32);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        let e = self.e as usize;
        let x = self.coords(a);
        let y = self.coords(b);
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        // t^e = -(m_0 + m_1 t + ... + m_{e-1} t^{e-1})
        for k in (e..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let m = self.modulus[i] as u64;
                prod[k - e + i] = (prod[k - e + i] + (p - m) % p * c) % p;
            }
        }
        let mut out = 0u32;
        let mut scale = 1u32;
        for &c in prod.iter().take(e) {
            out += c as u32 * scale;
            scale = scale.wrapping_mul(self.p);
        }
        Elem(out)
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: Elem, mut exp: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        if self.e == 1 {
            return a;
        }
        self.pow(a, self.p as u64)
    }

    /// Absolute trace `Tr_{F_q/F_p}(a)`, returned as an integer in `0..p`.
    pub fn trace(&self, a: Elem) -> u32 {
        let mut acc = Elem::ZERO;
        let mut conj = a;
        for _ in 0..self.e {
            acc = self.add(acc, conj);
            conj = self.frobenius(conj);
        }
        debug_assert!(acc.0 < self.p, "trace left the prime field");
        acc.0
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a.is_zero() || self.p == 2 || self.pow(a, (self.q as u64 - 1) / 2) == Elem::ONE
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Field", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.end()
    }
}

fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let base = Field::prime(p).expect("prime checked by caller");
    let ring = PolyRing::new(base);
    let count = (p as u64).pow(e);
    for k in 0..count {
        let mut coeffs = Vec::with_capacity(e as usize + 1);
        let mut x = k;
        for _ in 0..e {
            coeffs.push(Elem((x % p as u64) as u32));
            x /= p as u64;
        }
        coeffs.push(Elem::ONE);
        let f = Poly::from_coeffs(coeffs);
        if ring.is_irreducible(&f).unwrap_or(false) {
            return f.coeffs().iter().map(|c| c.0).collect();
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

/// An element bundled with its field.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<Field>,
    value: Elem,
}

impl FieldElement {
    pub fn new(field: &Arc<Field>, value: Elem) -> Self {
        assert!(value.0 < field.q, "element index out of range");
        FieldElement {
            field: Arc::clone(field),
            value,
        }
    }

    pub fn from_coords(field: &Arc<Field>, coords: &[u32]) -> Result<Self, GfError> {
        Ok(FieldElement::new(field, field.from_coords(coords)?))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(GfError::MixedFields {
                left: self.field.q,
                right: other.field.q,
            })
        }
    }

    fn with(&self, value: Elem) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            value,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.div(self.value, other.value)?))
    }

    pub fn inv(&self) -> Result<Self, GfError> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, exp: u64) -> Self {
        self.with(self.field.pow(self.value, exp))
    }

    pub fn frobenius(&self) -> Self {
        self.with(self.field.frobenius(self.value))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other).is_ok() && self.value == other.value
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

// Operator forms panic on mixed fields; use the `checked_*` methods to get an error.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Arc<Field>> {
        [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4), (3, 4)]
            .iter()
            .map(|&(p, e)| Field::new(p, e).unwrap())
            .collect()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(Field::new(1, 1).unwrap_err(), GfError::NotPrime(1));
        assert_eq!(Field::new(2, 0).unwrap_err(), GfError::DegreeOutOfRange(0));
        assert_eq!(Field::new(2, 9).unwrap_err(), GfError::DegreeOutOfRange(9));
    }

    #[test]
    fn deterministic_moduli() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.order(), 2);
        assert_eq!(f2.elements().count(), 2);
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    // Oracle: exhaustive root/factor scan over F_p for small e.
    fn has_factor_brute(p: u32, modulus: &[u32]) -> bool {
        let e = modulus.len() - 1;
        let fp = Field::prime(p).unwrap();
        let ring = PolyRing::new(fp);
        let f = Poly::from_coeffs(modulus.iter().map(|&c| Elem(c)).collect());
        for d in 1..=e / 2 {
            for k in 0..(p as u64).pow(d as u32) {
                let mut c: Vec<Elem> = (0..d)
                    .map(|i| Elem(((k / (p as u64).pow(i as u32)) % p as u64) as u32))
                    .collect();
                c.push(Elem::ONE);
                let g = Poly::from_coeffs(c);
                if ring.rem(&f, &g).unwrap().is_zero() {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn moduli_are_irreducible() {
        for (p, e) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3)] {
            let f = Field::new(p, e).unwrap();
            assert!(!has_factor_brute(p, f.modulus()), "F_{p}^{e}");
            assert_eq!(f.order(), p.pow(e));
        }
    }

    #[test]
    fn f2_and_f4_examples() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(f2.add(Elem::ONE, Elem::ONE), Elem::ZERO);
        for x in f2.elements() {
            assert_eq!(f2.frobenius(x), x);
        }
        let f4 = Field::new(2, 2).unwrap();
        let w = f4.generator();
        let w1 = f4.add(w, Elem::ONE);
        assert_eq!(f4.mul(w, w1), Elem::ONE);
        assert_eq!(f4.frobenius(w), w1);
        assert_eq!(f4.trace(w), 1);
    }

    #[test]
    fn frobenius_fixes_exactly_prime_subfield() {
        for f in all_fields() {
            let fixed: Vec<Elem> = f.elements().filter(|&x| f.frobenius(x) == x).collect();
            assert_eq!(fixed.len() as u32, f.characteristic());
            assert!(fixed.iter().all(|x| x.0 < f.characteristic()));
        }
    }

    #[test]
    fn fermat_and_group_order() {
        for f in all_fields() {
            let q = f.order() as u64;
            for x in f.elements() {
                assert_eq!(f.pow(x, q), x);
                if !x.is_zero() {
                    assert_eq!(f.pow(x, q - 1), Elem::ONE);
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), Elem::ONE);
                }
            }
        }
        let big = Field::new(3, 6).unwrap();
        assert!(big.mul_table.is_none());
        for x in big.elements().skip(1) {
            assert_eq!(big.pow(x, 728), Elem::ONE);
        }
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        for f in all_fields().into_iter().filter(|f| f.order() <= 9) {
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn tables_match_slow_path() {
        let f = Field::new(2, 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                assert_eq!(f.add(a, b), f.add_slow(a, b));
            }
        }
    }

    #[test]
    fn division_by_zero() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.inv(Elem::ZERO), Err(GfError::DivisionByZero));
        assert_eq!(f.div(Elem::ONE, Elem::ZERO), Err(GfError::DivisionByZero));
    }

    #[test]
    fn wrapped_elements() {
        let f4 = Field::new(2, 2).unwrap();
        let f9 = Field::new(3, 2).unwrap();
        let w = FieldElement::from_coords(&f4, &[0, 1]).unwrap();
        let one = FieldElement::new(&f4, Elem::ONE);
        assert_eq!(&w * &(&w + &one), one);
        assert_eq!(w.to_string(), "[0,1]");
        assert_eq!(serde_json::to_string(&w).unwrap(), "[0,1]");
        let x = FieldElement::new(&f9, Elem::ONE);
        assert!(matches!(w.checked_add(&x), Err(GfError::MixedFields { .. })));
        // An independently constructed copy of the same field is compatible.
        let f4b = Field::new(2, 2).unwrap();
        assert!(w.checked_mul(&FieldElement::new(&f4b, Elem::ONE)).is_ok());
        assert_eq!(
            serde_json::to_value(&*f4).unwrap(),
            serde_json::json!({"p": 2, "e": 2, "modulus": [1, 1, 1]})
        );
        assert!(FieldElement::from_coords(&f4, &[2]).is_err());
        assert!(w.inv().is_ok());
        assert!(FieldElement::new(&f4, Elem::ZERO).inv().is_err());
    }
}
