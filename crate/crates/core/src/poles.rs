//! Pole structure of the height zeta function `Z_lambda(s)` for a big class
//! `lambda = sum lambda_a D_a`, and the Tauberian main terms it predicts.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoleError {
    #[error("invalid bundle class: {0}")]
    InvalidClass(String),
    #[error("expected {expected} residues, got {got}")]
    ResidueCount { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `lambda_a = lambda'_a / p'_a` with `p'_a` a power of `p`, and `rho_a >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleClass {
    p: u32,
    lambda: Vec<Ratio<i64>>,
    rho: Vec<i64>,
}

fn is_power_of(n: i64, p: i64) -> bool {
    let mut n = n;
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

impl BundleClass {
    pub fn new(p: u32, lambda: Vec<Ratio<i64>>, rho: Vec<i64>) -> Result<BundleClass, PoleError> {
        let bad = |m: String| Err(PoleError::InvalidClass(m));
        if lambda.is_empty() || lambda.len() != rho.len() {
            return bad(format!("{} coefficients for {} indices", lambda.len(), rho.len()));
        }
        for (k, (l, r)) in lambda.iter().zip(&rho).enumerate() {
            if !l.is_positive() {
                return bad(format!("lambda_{k} = {l} is not positive"));
            }
            if !is_power_of(*l.denom(), p as i64) {
                return bad(format!("denominator of lambda_{k} = {l} is not a power of {p}"));
            }
            if *r < 1 {
                return bad(format!("rho_{k} = {r} < 1"));
            }
        }
        Ok(BundleClass { p, lambda, rho })
    }

    /// The anticanonical class `rho`.
    pub fn anticanonical(p: u32, rho: Vec<i64>) -> Result<BundleClass, PoleError> {
        let lambda = rho.iter().map(|&r| Ratio::from_integer(r)).collect();
        BundleClass::new(p, lambda, rho)
    }

    pub fn scaled(&self, k: Ratio<i64>) -> Result<BundleClass, PoleError> {
        BundleClass::new(self.p, self.lambda.iter().map(|l| l * k).collect(), self.rho.clone())
    }

    pub fn lambda(&self) -> &[Ratio<i64>] {
        &self.lambda
    }

    pub fn rho(&self) -> &[i64] {
        &self.rho
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.lambda.iter().all(|l| l.denom().is_one())
    }
}

/// A pole `a + j * 2 pi i / (d log q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pole {
    pub re: String,
    pub im_multiple_of: &'static str,
    pub multiple: u64,
    pub re_f64: f64,
    pub im_f64: f64,
}

impl Pole {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re_f64, self.im_f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleStructure {
    pub q: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub a: Ratio<i64>,
    pub a_indices: Vec<usize>,
    pub b: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub d: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub g: Ratio<i64>,
    pub poles: Vec<Pole>,
    /// Imaginary period `2 pi / (g log q)`.
    pub period_im: f64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn ceil_ratio(r: Ratio<i64>) -> u64 {
    r.ceil().to_integer() as u64
}

fn gcd_all(xs: impl Iterator<Item = i64>) -> i64 {
    xs.fold(0, |g, x| g.gcd(&x))
}

fn lcm_all(xs: impl Iterator<Item = i64>) -> i64 {
    xs.fold(1, |l, x| l.lcm(&x))
}

impl PoleStructure {
    pub fn pole_count(&self) -> usize {
        self.poles.len()
    }
}

/// Invariants `a, A, b, d, g` and the poles of maximal order.
pub fn pole_structure(class: &BundleClass, q: u64) -> PoleStructure {
    let ratios: Vec<Ratio<i64>> = class
        .rho
        .iter()
        .zip(&class.lambda)
        .map(|(&r, l)| Ratio::from_integer(r) / l)
        .collect();
    let a = *ratios.iter().max().expect("nonempty class");
    let a_indices: Vec<usize> = (0..ratios.len()).filter(|&k| ratios[k] == a).collect();
    let denom_lcm = lcm_all(class.lambda.iter().map(|l| *l.denom()));
    let g = Ratio::new(gcd_all(class.lambda.iter().map(|l| *l.numer())), denom_lcm);
    let d = Ratio::new(gcd_all(a_indices.iter().map(|&k| *class.lambda[k].numer())), denom_lcm);
    let log_q = (q as f64).ln();
    let step = 2.0 * PI / (ratio_f64(d) * log_q);
    let poles = (0..ceil_ratio(d))
        .map(|j| Pole {
            re: a.to_string(),
            im_multiple_of: "2π/(d·log q)",
            multiple: j,
            re_f64: ratio_f64(a),
            im_f64: j as f64 * step,
        })
        .collect();
    PoleStructure {
        q,
        a,
        b: a_indices.len(),
        a_indices,
        d,
        g,
        poles,
        period_im: 2.0 * PI / (ratio_f64(g) * log_q),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(log q)^b / (b-1)! * M^{b-1} * sum_j q^{s_j M} r_j`, real part.
pub fn tauberian_predict(
    a: Ratio<i64>,
    b: usize,
    d: Ratio<i64>,
    residues: &[Complex64],
    q: u64,
    m: u32,
) -> Result<f64, PoleError> {
    if b == 0 {
        return Err(PoleError::InvalidParameter("pole order b must be at least 1".into()));
    }
    if !d.is_positive() {
        return Err(PoleError::InvalidParameter(format!("d = {d} must be positive")));
    }
    let count = ceil_ratio(d) as usize;
    if residues.len() != count {
        return Err(PoleError::ResidueCount {
            expected: count,
            got: residues.len(),
        });
    }
    let log_q = (q as f64).ln();
    let mf = m as f64;
    let step = 2.0 * PI / (ratio_f64(d) * log_q);
    let sum: Complex64 = residues
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let s = Complex64::new(ratio_f64(a), j as f64 * step);
            (s * (mf * log_q)).exp() * r
        })
        .sum();
    let prefactor = log_q.powi(b as i32) / factorial(b - 1) * mf.powi(b as i32 - 1);
    Ok(prefactor * sum.re)
}

/// Main term `c (log q)^b / (b-1)! q^{aM} M^{b-1}` of the `d`-term average.
pub fn averaged_asymptotic(c: f64, a: Ratio<i64>, b: usize, d: Ratio<i64>, q: u64, m: u32) -> Result<f64, PoleError> {
    if !(c > 0.0) {
        return Err(PoleError::InvalidParameter(format!("c = {c} must be positive")));
    }
    if b == 0 || !d.is_positive() {
        return Err(PoleError::InvalidParameter("need b >= 1 and d > 0".into()));
    }
    let log_q = (q as f64).ln();
    let mf = m as f64;
    Ok(c * log_q.powi(b as i32) / factorial(b - 1) * (ratio_f64(a) * mf * log_q).exp() * mf.powi(b as i32 - 1))
}
