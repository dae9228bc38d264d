use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use super::PolyError;
use crate::gf::{Elem, Field};

/// Dense univariate polynomial, lowest degree first, without trailing zeros.
///
/// The coefficient field is not stored; arithmetic goes through a
/// [`PolyRing`]. Ordering is by degree, then by coefficients from the leading
/// term down, which is the lexicographic order used for places.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Elem::ONE)
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Poly {
        let mut coeffs = vec![Elem::ZERO; k + 1];
        coeffs[k] = Elem::ONE;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for degree minus infinity.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Elem::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Elem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `F_q[t]` over a fixed field.
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: Arc<Field>,
}

impl PolyRing {
    pub fn new(field: Arc<Field>) -> PolyRing {
        PolyRing { field }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    /// Polynomial from small integer coefficients (images in the prime field).
    pub fn from_ints(&self, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| self.field.from_int(c)).collect())
    }

    /// The variable `t`.
    pub fn t(&self) -> Poly {
        Poly::monomial(1)
    }

    pub fn add(&self, f: &Poly, g: &Poly) -> Poly {
        let n = f.coeffs.len().max(g.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(f.coeff(i), g.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self, f: &Poly) -> Poly {
        Poly::from_coeffs(f.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn sub(&self, f: &Poly, g: &Poly) -> Poly {
        let n = f.coeffs.len().max(g.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.sub(f.coeff(i), g.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, f: &Poly, c: Elem) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(f.coeffs.iter().map(|&a| self.field.mul(a, c)).collect())
    }

    pub fn mul(&self, f: &Poly, g: &Poly) -> Poly {
        if f.is_zero() || g.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; f.coeffs.len() + g.coeffs.len() - 1];
        for (i, &a) in f.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, f: &Poly, mut exp: u64) -> Poly {
        let mut base = f.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `f^p` computed coefficientwise: `(sum c_k t^k)^p = sum c_k^p t^{kp}`.
    pub fn frobenius_power(&self, f: &Poly) -> Poly {
        let p = self.field.characteristic() as usize;
        let mut out = vec![Elem::ZERO; f.coeffs.len().saturating_sub(1) * p + 1];
        for (k, &c) in f.coeffs.iter().enumerate() {
            out[k * p] = self.field.frobenius(c);
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder. Errors on a zero divisor.
    pub fn divmod(&self, f: &Poly, g: &Poly) -> Result<(Poly, Poly), PolyError> {
        let dg = g.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = self
            .field
            .inv(g.leading())
            .map_err(|_| PolyError::DivisionByZero)?;
        let mut rem = f.coeffs.clone();
        if rem.len() <= dg {
            return Ok((Poly::zero(), f.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dg];
        for k in (dg..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = self.field.mul(c, lead_inv);
            quot[k - dg] = factor;
            for (i, &b) in g.coeffs.iter().enumerate() {
                let idx = k - dg + i;
                rem[idx] = self.field.sub(rem[idx], self.field.mul(factor, b));
            }
        }
        rem.truncate(dg);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divmod(f, g)?.1)
    }

    /// Exact quotient; errors if `g` does not divide `f`.
    pub fn div_exact(&self, f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
        let (quot, rem) = self.divmod(f, g)?;
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    pub fn monic(&self, f: &Poly) -> Poly {
        if f.is_zero() || f.is_monic() {
            return f.clone();
        }
        let inv = self.field.inv(f.leading()).expect("nonzero leading coefficient");
        self.scale(f, inv)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, f: &Poly, g: &Poly) -> Poly {
        let (mut a, mut b) = (f.clone(), g.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn eval(&self, f: &Poly, x: Elem) -> Elem {
        f.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    /// Monic gcd of a tuple; zero when every entry is zero.
    pub fn content(&self, polys: &[Poly]) -> Poly {
        let mut g = Poly::zero();
        for f in polys {
            g = self.gcd(&g, f);
            if g.degree() == Some(0) {
                break;
            }
        }
        g
    }

    /// Divides a tuple by its content. Errors on the all-zero tuple.
    pub fn primitive_part(&self, polys: &[Poly]) -> Result<Vec<Poly>, PolyError> {
        let c = self.content(polys);
        if c.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        polys.iter().map(|f| self.div_exact(f, &c)).collect()
    }

    /// Largest `k` with `pi^k | f`; `None` for `f = 0`.
    pub fn valuation(&self, f: &Poly, pi: &Poly) -> Option<u32> {
        if f.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut cur = f.clone();
        loop {
            let (q, r) = self.divmod(&cur, pi).expect("nonzero place polynomial");
            if !r.is_zero() {
                return Some(k);
            }
            cur = q;
            k += 1;
        }
    }

    /// `base^exp mod m`.
    pub fn powmod(&self, base: &Poly, mut exp: u64, m: &Poly) -> Poly {
        let mut b = self.rem(base, m).expect("nonzero modulus");
        let mut acc = self.rem(&Poly::one(), m).expect("nonzero modulus");
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &b), m).expect("nonzero modulus");
            }
            exp >>= 1;
            if exp > 0 {
                b = self.rem(&self.mul(&b, &b), m).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Distinct-degree criterion: `f` of degree `d` is irreducible iff
    /// `t^{q^d} = t mod f` and `gcd(t^{q^{d/r}} - t, f) = 1` for each prime
    /// `r | d`.
    pub fn is_irreducible(&self, f: &Poly) -> Result<bool, PolyError> {
        let d = match f.degree() {
            None | Some(0) => return Err(PolyError::ConstantInput),
            Some(d) => d,
        };
        if d == 1 {
            return Ok(true);
        }
        let f = self.monic(f);
        // Cheap rejection: a root in F_q.
        if self.q() <= 64 && self.field.elements().any(|x| self.eval(&f, x).is_zero()) {
            return Ok(false);
        }
        let t = self.t();
        let q = self.q();
        // frob[k] = t^{q^k} mod f
        let mut frob = Vec::with_capacity(d + 1);
        frob.push(self.rem(&t, &f)?);
        for k in 1..=d {
            let next = self.powmod(&frob[k - 1], q, &f);
            frob.push(next);
        }
        if frob[d] != self.rem(&t, &f)? {
            return Ok(false);
        }
        for r in prime_divisors(d as u64) {
            let h = self.sub(&frob[d / r as usize], &t);
            if self.gcd(&h, &f).degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of polynomials of degree `< n` (including zero), `q^n`.
    pub fn count_below_degree(&self, n: u32) -> Option<u64> {
        self.q().checked_pow(n)
    }

    /// Polynomial whose coefficient vector is the base-`q` expansion of
    /// `index`, lowest digit first. Bijective from `0..q^n` onto polynomials
    /// of degree `< n`.
    pub fn poly_from_index(&self, mut index: u64) -> Poly {
        let q = self.q();
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push(Elem((index % q) as u32));
            index /= q;
        }
        Poly::from_coeffs(coeffs)
    }

    /// Monic polynomial of degree `d` whose lower coefficients are given by
    /// `index` in `0..q^d`.
    pub fn monic_from_index(&self, d: usize, index: u64) -> Poly {
        let low = self.poly_from_index(index);
        let mut coeffs = low.coeffs;
        coeffs.resize(d, Elem::ZERO);
        coeffs.push(Elem::ONE);
        Poly { coeffs }
    }

    /// Human-readable form such as `t^2+t+1`. Coefficients of extension
    /// fields print as coordinate tuples.
    pub fn format(&self, f: &Poly) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, &c) in f.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            let coeff = if self.field.degree() == 1 {
                c.index().to_string()
            } else {
                let parts: Vec<String> =
                    self.field.coords(c).iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(","))
            };
            match k {
                0 => out.push_str(&coeff),
                _ => {
                    if c != Elem::ONE {
                        out.push_str(&coeff);
                    }
                    out.push('t');
                    if k > 1 {
                        let _ = write!(out, "^{k}");
                    }
                }
            }
        }
        out
    }

    /// Coefficients as coordinate tuples, for serialization.
    pub fn coords(&self, f: &Poly) -> Vec<Vec<u32>> {
        f.coeffs.iter().map(|&c| self.field.coords(c)).collect()
    }

    pub fn serializable(&self, f: &Poly) -> impl Serialize {
        self.coords(f)
    }
}

pub(crate) fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> PolyRing {
        PolyRing::new(Field::prime(2).unwrap())
    }

    #[test]
    fn gcd_examples() {
        let r = f2();
        let f = r.from_ints(&[0, 1, 1]); // t^2 + t
        let g = r.from_ints(&[1, 1]); // t + 1
        assert_eq!(r.gcd(&f, &g), g);
        let r3 = PolyRing::new(Field::prime(3).unwrap());
        let h = r3.from_ints(&[1, 0, 2]); // 2t^2 + 1
        assert_eq!(r3.gcd(&h, &Poly::zero()), r3.monic(&h));
        assert!(r3.gcd(&h, &Poly::zero()).is_monic());
        assert!(r.gcd(&Poly::zero(), &Poly::zero()).is_zero());
    }

    #[test]
    fn freshman_dream() {
        let r = f2();
        let f = r.from_ints(&[1, 1]);
        assert_eq!(r.mul(&f, &f), r.from_ints(&[1, 0, 1]));
        assert_eq!(r.frobenius_power(&f), r.from_ints(&[1, 0, 1]));
        let r4 = PolyRing::new(Field::new(2, 2).unwrap());
        let w = r4.field().generator();
        let g = Poly::from_coeffs(vec![w, Elem::ONE, w]);
        assert_eq!(r4.frobenius_power(&g), r4.pow(&g, 2));
    }

    #[test]
    fn divmod_reconstructs() {
        let r = PolyRing::new(Field::new(3, 2).unwrap());
        for a in [5u64, 100, 731, 6000] {
            for b in [1u64, 4, 29, 80] {
                let f = r.poly_from_index(a);
                let g = r.poly_from_index(b);
                let (qu, re) = r.divmod(&f, &g).unwrap();
                assert_eq!(r.add(&r.mul(&qu, &g), &re), f);
                assert!(re.degree() < g.degree() || re.is_zero());
            }
        }
        assert_eq!(
            r.divmod(&Poly::one(), &Poly::zero()),
            Err(PolyError::DivisionByZero)
        );
    }

    #[test]
    fn irreducibility_examples() {
        let r = f2();
        assert!(r.is_irreducible(&r.from_ints(&[1, 1, 1])).unwrap());
        assert!(!r.is_irreducible(&r.from_ints(&[1, 0, 1])).unwrap());
        assert!(r.is_irreducible(&r.from_ints(&[0, 1])).unwrap());
        assert!(r.is_irreducible(&r.from_ints(&[1, 1])).unwrap());
        assert_eq!(r.is_irreducible(&Poly::one()), Err(PolyError::ConstantInput));
        assert_eq!(r.is_irreducible(&Poly::zero()), Err(PolyError::ConstantInput));
        // (t^2+t+1)^2 has no roots but is reducible.
        let g = r.from_ints(&[1, 1, 1]);
        assert!(!r.is_irreducible(&r.mul(&g, &g)).unwrap());
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for (p, e, dmax) in [(2u32, 1u32, 8usize), (3, 1, 5), (2, 2, 4)] {
            let r = PolyRing::new(Field::new(p, e).unwrap());
            let q = r.q();
            for d in 1..=dmax {
                for idx in 0..q.pow(d as u32) {
                    let f = r.monic_from_index(d, idx);
                    let mut reducible = false;
                    'outer: for k in 1..=d / 2 {
                        for j in 0..q.pow(k as u32) {
                            let g = r.monic_from_index(k, j);
                            if r.rem(&f, &g).unwrap().is_zero() {
                                reducible = true;
                                break 'outer;
                            }
                        }
                    }
                    assert_eq!(r.is_irreducible(&f).unwrap(), !reducible, "{}", r.format(&f));
                }
            }
        }
    }

    #[test]
    fn content_and_primitive_part() {
        let r = f2();
        let a = r.from_ints(&[0, 1, 1]);
        let b = r.from_ints(&[1, 1]);
        assert_eq!(r.content(&[a.clone(), b.clone()]), b);
        assert_eq!(
            r.primitive_part(&[a, b]).unwrap(),
            vec![r.t(), Poly::one()]
        );
        assert!(r.primitive_part(&[Poly::zero(), Poly::zero()]).is_err());
    }

    #[test]
    fn valuation_and_format() {
        let r = f2();
        let f = r.from_ints(&[0, 0, 1, 1]);
        assert_eq!(r.valuation(&f, &r.t()), Some(2));
        assert_eq!(r.valuation(&f, &r.from_ints(&[1, 1])), Some(1));
        assert_eq!(r.valuation(&Poly::zero(), &r.t()), None);
        assert_eq!(r.format(&r.from_ints(&[1, 1, 1])), "t^2+t+1");
        assert_eq!(r.format(&Poly::zero()), "0");
        let r3 = PolyRing::new(Field::prime(3).unwrap());
        assert_eq!(r3.format(&r3.from_ints(&[2, 0, 2])), "2t^2+2");
    }

    #[test]
    fn ordering_is_degree_then_leading_down() {
        let r = f2();
        let mut v = vec![
            r.from_ints(&[1, 1]),
            r.from_ints(&[0, 0, 1]),
            r.from_ints(&[0, 1]),
            r.from_ints(&[1]),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                r.from_ints(&[1]),
                r.from_ints(&[0, 1]),
                r.from_ints(&[1, 1]),
                r.from_ints(&[0, 0, 1])
            ]
        );
    }
}
