//! Additive character sums over truncated local fields `F_{q_v}((pi))`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elem, Field, GfError};
use crate::polyfield::Place;

/// Default cap on enumerated unit residues.
pub const DEFAULT_UNIT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharSumError {
    #[error("the window [{low}, {high}) does not contain index -1")]
    WindowExcludesMinusOne { low: i64, high: i64 },
    #[error("precision e = {e} is below n*d + 1 = {needed}")]
    InsufficientPrecision { e: u32, needed: u32 },
    #[error("the place at infinity is excluded")]
    InfinitePlace,
    #[error("argument is not a unit")]
    NotAUnit,
    #[error("operands have different residue fields")]
    MixedFields,
    #[error("{needed} unit residues exceed the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Residue field `F_{q_v}` of a finite place, as an abstract field of that order.
pub fn residue_field(v: &Place) -> Result<Arc<Field>, CharSumError> {
    if v.is_infinite() {
        return Err(CharSumError::InfinitePlace);
    }
    let f = v.field();
    Ok(Field::new(f.characteristic(), f.degree() * v.degree())?)
}

/// `sum_{low <= i < high} x_i pi^i` with coefficients in the residue field.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentTruncation {
    field: Arc<Field>,
    low: i64,
    coeffs: Vec<Elem>,
    truncated: bool,
}

impl LaurentTruncation {
    pub fn new(field: &Arc<Field>, low: i64, coeffs: Vec<Elem>) -> LaurentTruncation {
        LaurentTruncation {
            field: Arc::clone(field),
            low,
            coeffs,
            truncated: false,
        }
    }

    pub fn zero(field: &Arc<Field>, low: i64, len: usize) -> LaurentTruncation {
        LaurentTruncation::new(field, low, vec![Elem::ZERO; len])
    }

    /// Element of `F_v` at a finite place.
    pub fn at_place(v: &Place, low: i64, coeffs: Vec<Elem>) -> Result<LaurentTruncation, CharSumError> {
        Ok(LaurentTruncation::new(&residue_field(v)?, low, coeffs))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// One past the last known index.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Whether an operation dropped a nonzero term outside the window.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn coeff(&self, i: i64) -> Elem {
        if i < self.low || i >= self.high() {
            return Elem::ZERO;
        }
        self.coeffs[(i - self.low) as usize]
    }

    /// `x * pi^k`.
    pub fn shift(&self, k: i64) -> LaurentTruncation {
        LaurentTruncation {
            low: self.low + k,
            ..self.clone()
        }
    }

    /// Extends the window down to `low` with zero coefficients, which is
    /// exact for the integral part of the expansion.
    pub fn widen_low(&self, low: i64) -> LaurentTruncation {
        if low >= self.low {
            return self.clone();
        }
        let mut coeffs = vec![Elem::ZERO; (self.low - low) as usize];
        coeffs.extend_from_slice(&self.coeffs);
        LaurentTruncation {
            low,
            coeffs,
            ..self.clone()
        }
    }

    pub fn is_unit(&self) -> bool {
        (self.low..0).all(|i| self.coeff(i).is_zero()) && !self.coeff(0).is_zero()
    }

    /// Sum on the window of `self`; terms of `other` outside it are dropped and flagged.
    pub fn add(&self, other: &LaurentTruncation) -> Result<LaurentTruncation, CharSumError> {
        if self.field != other.field {
            return Err(CharSumError::MixedFields);
        }
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (k, &c) in other.coeffs.iter().enumerate() {
            let i = other.low + k as i64;
            if i < self.low || i >= self.high() {
                out.truncated |= !c.is_zero();
                continue;
            }
            let slot = &mut out.coeffs[(i - self.low) as usize];
            *slot = self.field.add(*slot, c);
        }
        Ok(out)
    }

    /// Product on the window `[low_1 + low_2, min(high_1 + low_2, high_2 + low_1))`,
    /// the range the factors determine.
    pub fn mul(&self, other: &LaurentTruncation) -> Result<LaurentTruncation, CharSumError> {
        if self.field != other.field {
            return Err(CharSumError::MixedFields);
        }
        let low = self.low + other.low;
        let high = (self.high() + other.low).min(other.high() + self.low);
        let len = (high - low).max(0) as usize;
        let mut coeffs = vec![Elem::ZERO; len];
        let mut truncated = self.truncated || other.truncated;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = i + j;
                if k >= len {
                    truncated = true;
                    break;
                }
                coeffs[k] = self.field.add(coeffs[k], self.field.mul(a, b));
            }
        }
        Ok(LaurentTruncation {
            field: Arc::clone(&self.field),
            low,
            coeffs,
            truncated,
        })
    }

    pub fn pow(&self, exp: u32) -> Result<LaurentTruncation, CharSumError> {
        let mut out = LaurentTruncation::new(&self.field, 0, vec![Elem::ONE]);
        // pad the unit so it does not limit the precision of the product
        out.coeffs.resize(self.coeffs.len().max(1), Elem::ZERO);
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

/// `exp(2 pi i k / p)`.
fn root_of_unity(k: u32, p: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)
}

/// `phi_v(x) = exp(2 pi i Tr(x_{-1}) / p)`.
pub fn phi_character(x: &LaurentTruncation) -> Result<Complex64, CharSumError> {
    if x.low() > -1 || x.high() <= -1 {
        return Err(CharSumError::WindowExcludesMinusOne {
            low: x.low(),
            high: x.high(),
        });
    }
    let f = x.field();
    Ok(root_of_unity(f.trace(x.coeff(-1)), f.characteristic()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMethod {
    /// Every unit residue modulo `pi^e`.
    Exhaustive,
    /// Units modulo `pi^{nd}`; the fiber over the top free coefficient is a
    /// linear character sum evaluated in closed form.
    Fibered,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharSum {
    pub value: Complex64,
    pub e: u32,
    pub stabilized: bool,
    /// False when `p | d > 0`, outside the range the table describes.
    pub validated: bool,
}

impl Serialize for CharSum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report {
            value_re: f64,
            value_im: f64,
            e: u32,
            stabilized: bool,
            validated: bool,
        }
        Report {
            value_re: self.value.re,
            value_im: self.value.im,
            e: self.e,
            stabilized: self.stabilized,
            validated: self.validated,
        }
        .serialize(serializer)
    }
}

/// Odometer over coefficient vectors with a nonzero constant term.
fn for_each_unit<F: FnMut(&[Elem])>(q: u32, len: usize, mut visit: F) {
    let mut w = vec![Elem::ZERO; len];
    w[0] = Elem::ONE;
    loop {
        visit(&w);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let next = w[k].index() + 1;
            if next < q {
                w[k] = Elem(next);
                break;
            }
            w[k] = if k == 0 { Elem::ONE } else { Elem::ZERO };
        }
    }
}

fn unit_sum_at(
    u: &LaurentTruncation,
    n: u32,
    d: u32,
    e: u32,
    method: SumMethod,
    budget: u64,
) -> Result<Complex64, CharSumError> {
    let field = u.field();
    let q = field.order();
    let qf = q as f64;
    let nd = (n * d) as i64;
    // u mod pi^e as a window [0, e)
    let u_mod: Vec<Elem> = (0..e as i64).map(|i| u.coeff(i)).collect();
    let u_e = LaurentTruncation::new(field, 0, u_mod);
    let top = |w: &[Elem]| -> Result<Complex64, CharSumError> {
        let w = LaurentTruncation::new(field, 0, w.to_vec());
        let x = u_e.mul(&w.pow(d)?)?.shift(-nd).widen_low(-1);
        phi_character(&x)
    };
    match method {
        SumMethod::Exhaustive => {
            let needed = (q as u64 - 1).saturating_mul((q as u64).saturating_pow(e - 1));
            if needed > budget {
                return Err(CharSumError::BudgetExceeded { needed, budget });
            }
            let mut sum = Complex64::new(0.0, 0.0);
            let mut err = None;
            for_each_unit(q, e as usize, |w| match top(w) {
                Ok(z) => sum += z,
                Err(x) => err = Some(x),
            });
            if let Some(x) = err {
                return Err(x);
            }
            Ok(sum / qf.powi(e as i32))
        }
        SumMethod::Fibered => {
            // the integrand depends on w mod pi^k only
            let k = nd.max(1) as u32;
            let mut sum = Complex64::new(0.0, 0.0);
            if k == 1 {
                let needed = q as u64 - 1;
                if needed > budget {
                    return Err(CharSumError::BudgetExceeded { needed, budget });
                }
                for_each_unit(q, 1, |w| sum += top(&[w[0]]).expect("window contains -1"));
                return Ok(sum / qf);
            }
            // w = w' + y pi^L with L = nd - 1 >= 1: the coefficient of pi^L in
            // u w^d is c(w') + d u_0 w_0^{d-1} y, and 2L >= L + 1
            let last = k as usize - 1;
            let d_elem = field.from_int(d as i64);
            let mut err = None;
            let mut visited = 0u64;
            for w0 in 1..q {
                let w0 = Elem(w0);
                let slope = field.mul(field.mul(d_elem, u.coeff(0)), field.pow(w0, d as u64 - 1));
                if !slope.is_zero() {
                    continue;
                }
                let middle = (q as u64).saturating_pow(last as u32 - 1);
                visited = visited.saturating_add(middle);
                if visited > budget {
                    return Err(CharSumError::BudgetExceeded { needed: visited, budget });
                }
                let mut w = vec![Elem::ZERO; k as usize];
                w[0] = w0;
                for idx in 0..middle {
                    let mut x = idx;
                    for c in w.iter_mut().take(last).skip(1) {
                        *c = Elem((x % q as u64) as u32);
                        x /= q as u64;
                    }
                    match top(&w) {
                        Ok(z) => sum += z * qf,
                        Err(x) => err = Some(x),
                    }
                }
            }
            if let Some(x) = err {
                return Err(x);
            }
            Ok(sum / qf.powi(k as i32))
        }
    }
}

/// `q_v^{-e} sum_{w in (O/pi^e)^*} phi(u pi^{-nd} w^d)`.
pub fn unit_character_sum(
    u: &LaurentTruncation,
    n: u32,
    d: u32,
    e: u32,
    method: SumMethod,
    budget: Option<u64>,
) -> Result<CharSum, CharSumError> {
    if !u.is_unit() {
        return Err(CharSumError::NotAUnit);
    }
    let needed = n * d + 1;
    if e < needed {
        return Err(CharSumError::InsufficientPrecision { e, needed });
    }
    let budget = budget.unwrap_or(DEFAULT_UNIT_BUDGET);
    let value = unit_sum_at(u, n, d, e, method, budget)?;
    let next = unit_sum_at(u, n, d, e + 1, method, budget)?;
    let p = u.field().characteristic();
    Ok(CharSum {
        value,
        e,
        stabilized: (value - next).norm() <= 1e-12,
        validated: d == 0 || d % p != 0,
    })
}

/// `1 - 1/q_v` for `d = 0`, `-1/q_v` for `n = d = 1`, else 0.
pub fn lemma_value(q_v: u64, n: u32, d: u32) -> f64 {
    let q = q_v as f64;
    match (n, d) {
        (_, 0) => 1.0 - 1.0 / q,
        (1, 1) => -1.0 / q,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::PolyRing;

    fn field_of_order(q: u32) -> Arc<Field> {
        match q {
            4 => Field::new(2, 2).unwrap(),
            8 => Field::new(2, 3).unwrap(),
            9 => Field::new(3, 2).unwrap(),
            _ => Field::prime(q).unwrap(),
        }
    }

    fn unit(f: &Arc<Field>, coeffs: &[u32]) -> LaurentTruncation {
        LaurentTruncation::new(f, 0, coeffs.iter().map(|&c| Elem(c)).collect())
    }

    #[test]
    fn phi_examples() {
        let f2 = field_of_order(2);
        let x = LaurentTruncation::new(&f2, -2, vec![Elem(1), Elem(0), Elem(1)]);
        assert!((phi_character(&x).unwrap() - 1.0).norm() < 1e-15);
        let x = LaurentTruncation::new(&f2, -1, vec![Elem(1)]);
        assert!((phi_character(&x).unwrap() + 1.0).norm() < 1e-15);
        let f4 = field_of_order(4);
        let omega = f4.generator();
        assert_eq!(f4.trace(omega), 1);
        let x = LaurentTruncation::new(&f4, -1, vec![omega]);
        assert!((phi_character(&x).unwrap() + 1.0).norm() < 1e-15);
        let y = LaurentTruncation::new(&f4, 0, vec![Elem(1)]);
        assert!(matches!(phi_character(&y), Err(CharSumError::WindowExcludesMinusOne { .. })));
    }

    #[test]
    fn lemma_examples() {
        let f2 = field_of_order(2);
        let r = unit_character_sum(&unit(&f2, &[1]), 1, 0, 1, SumMethod::Exhaustive, None).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-12 && r.stabilized && r.validated);
        let f3 = field_of_order(3);
        let r = unit_character_sum(&unit(&f3, &[1]), 1, 1, 2, SumMethod::Exhaustive, None).unwrap();
        assert!((r.value.re + 1.0 / 3.0).abs() < 1e-12);
        let r = unit_character_sum(&unit(&f3, &[2, 1]), 1, 2, 3, SumMethod::Exhaustive, None).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn methods_agree_on_small_cases() {
        for q in [2u32, 3, 4, 5] {
            let f = field_of_order(q);
            let u = unit(&f, &[1, q - 1, 1]);
            for n in 1..=2u32 {
                for d in 0..=3u32 {
                    let e = n * d + 1;
                    if ((q - 1) as u64) * (q as u64).pow(e) > 200_000 {
                        continue;
                    }
                    let a = unit_character_sum(&u, n, d, e, SumMethod::Exhaustive, None).unwrap();
                    let b = unit_character_sum(&u, n, d, e, SumMethod::Fibered, None).unwrap();
                    assert!((a.value - b.value).norm() < 1e-10, "q={q} n={n} d={d}");
                    assert!(a.stabilized);
                }
            }
        }
    }

    #[test]
    fn table_reproduced() {
        for q in [2u32, 3, 4, 5] {
            let f = field_of_order(q);
            let p = f.characteristic();
            let u = unit(&f, &[q - 1, 1]);
            for n in 1..=3u32 {
                for d in (0..=4u32).filter(|d| *d == 0 || d % p != 0) {
                    let r = unit_character_sum(&u, n, d, n * d + 1, SumMethod::Fibered, None).unwrap();
                    assert!(
                        (r.value - lemma_value(q as u64, n, d)).norm() < 1e-10,
                        "q={q} n={n} d={d}: {}",
                        r.value
                    );
                    assert!(r.validated);
                }
            }
        }
    }

    #[test]
    fn outside_hypothesis_is_flagged() {
        let f = field_of_order(2);
        let r = unit_character_sum(&unit(&f, &[1]), 1, 2, 3, SumMethod::Fibered, None).unwrap();
        assert!(!r.validated);
        let ex = unit_character_sum(&unit(&f, &[1]), 1, 2, 3, SumMethod::Exhaustive, None).unwrap();
        assert!((r.value - ex.value).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        let f = field_of_order(3);
        assert_eq!(
            unit_character_sum(&unit(&f, &[1]), 2, 2, 4, SumMethod::Fibered, None),
            Err(CharSumError::InsufficientPrecision { e: 4, needed: 5 })
        );
        assert_eq!(
            unit_character_sum(&unit(&f, &[0, 1]), 1, 1, 2, SumMethod::Fibered, None),
            Err(CharSumError::NotAUnit)
        );
        assert!(matches!(
            unit_character_sum(&unit(&f, &[1]), 3, 4, 13, SumMethod::Exhaustive, Some(1000)),
            Err(CharSumError::BudgetExceeded { .. })
        ));
        let ring = PolyRing::new(Field::prime(3).unwrap());
        assert_eq!(residue_field(&Place::infinity(&ring)), Err(CharSumError::InfinitePlace));
        let v = Place::finite(&ring, ring.from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(residue_field(&v).unwrap().order(), 9);
    }

    #[test]
    fn truncation_flag() {
        let f = field_of_order(3);
        let a = LaurentTruncation::new(&f, 0, vec![Elem(1), Elem(1)]);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coeffs(), &[Elem(1), Elem(2)]);
        assert!(sq.truncated());
        let b = LaurentTruncation::new(&f, 0, vec![Elem(1), Elem(0)]);
        assert!(!b.mul(&b).unwrap().truncated());
        let wide = LaurentTruncation::new(&f, -3, vec![Elem(1)]);
        assert!(b.add(&wide).unwrap().truncated());
    }

    #[test]
    fn json() {
        let f = field_of_order(3);
        let r = unit_character_sum(&unit(&f, &[1]), 1, 1, 2, SumMethod::Fibered, None).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["e"], 2);
        assert_eq!(v["stabilized"], true);
        assert!((v["value_re"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }
}
