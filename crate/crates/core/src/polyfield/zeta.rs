//! The zeta function of `F_q(t)` and truncated Euler products over its places.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::place::{irreducibles_of_degree, necklace_count, Place};
use super::{PolyError, PolyRing};

const POLE_EPS: f64 = 1e-12;

/// `zeta_F(s) = 1 / ((1 - q^{-s}) (1 - q^{1-s}))`.
pub fn zeta_closed(q: u64, s: Complex64) -> Result<Complex64, PolyError> {
    let qf = q as f64;
    let a = Complex64::new(1.0, 0.0) - Complex64::new(qf, 0.0).powc(-s);
    let b = Complex64::new(1.0, 0.0) - Complex64::new(qf, 0.0).powc(Complex64::new(1.0, 0.0) - s);
    if a.norm() < POLE_EPS || b.norm() < POLE_EPS {
        return Err(PolyError::Pole);
    }
    Ok((a * b).inv())
}

/// Finite part `prod_{v != inf} (1 - q_v^{-s})^{-1} = 1 / (1 - q^{1-s})`.
pub fn zeta_finite_closed(q: u64, s: Complex64) -> Result<Complex64, PolyError> {
    let b = Complex64::new(1.0, 0.0) - Complex64::new(q as f64, 0.0).powc(Complex64::new(1.0, 0.0) - s);
    if b.norm() < POLE_EPS {
        return Err(PolyError::Pole);
    }
    Ok(b.inv())
}

/// `Res_{s=1} zeta_F(s) = q / ((q - 1) log q)`.
pub fn zeta_residue(q: u64) -> f64 {
    let qf = q as f64;
    qf / ((qf - 1.0) * qf.ln())
}

/// Declared decay of the local factors: `|factor_v - 1| <= constant * q_v^{-1-delta}`
/// for every place beyond the cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailModel {
    pub delta: f64,
    pub constant: f64,
}

impl TailModel {
    pub fn new(delta: f64, constant: f64) -> Result<TailModel, PolyError> {
        if !(delta > 0.0) || !(constant >= 0.0) {
            return Err(PolyError::BadTailModel(delta));
        }
        Ok(TailModel { delta, constant })
    }

    /// Bound on `|prod_{deg v > D} factor_v - 1|`, using at most `q^d/d`
    /// places of degree `d`.
    ///
    /// With `z_v = factor_v - 1`, `|log(1 + z)| <= |z| / (1 - |z|)`, so the
    /// tail logarithm is at most `T = K/(1-z_max) sum_{d>D} q^{-d delta}/d`
    /// and the product differs from 1 by at most `exp(T) - 1`.
    pub fn relative_bound(&self, q: u64, cutoff: u32) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let qf = q as f64;
        let first = (cutoff + 1) as f64;
        let z_max = self.constant * qf.powf(-first * (1.0 + self.delta));
        if z_max >= 0.5 {
            return f64::INFINITY;
        }
        let ratio = qf.powf(-self.delta);
        let sum = ratio.powf(first) / first / (1.0 - ratio);
        let t = self.constant * sum / (1.0 - z_max);
        t.exp_m1()
    }
}

/// A truncated Euler product and a bound on the omitted tail.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProduct {
    pub value: Complex64,
    pub cutoff_degree: u32,
    pub tail_bound: f64,
}

impl Serialize for EulerProduct {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report {
            value_re: f64,
            value_im: f64,
            cutoff_degree: u32,
            tail_bound: f64,
        }
        Report {
            value_re: self.value.re,
            value_im: self.value.im,
            cutoff_degree: self.cutoff_degree,
            tail_bound: self.tail_bound,
        }
        .serialize(serializer)
    }
}

fn finish(value: Complex64, q: u64, cutoff: u32, tail: TailModel) -> EulerProduct {
    EulerProduct {
        value,
        cutoff_degree: cutoff,
        tail_bound: value.norm() * tail.relative_bound(q, cutoff),
    }
}

/// Product of `factor(v)` over the finite places of degree `<= cutoff`
/// (and over infinity when requested). Places are enumerated explicitly;
/// each degree is handled by one worker and partial products are combined
/// in degree order, so the result does not depend on the thread count.
pub fn euler_product<F>(
    ring: &PolyRing,
    factor: F,
    cutoff: u32,
    include_infinity: bool,
    tail: TailModel,
) -> EulerProduct
where
    F: Fn(&Place) -> Complex64 + Sync,
{
    let partials: Vec<Complex64> = (1..=cutoff as usize)
        .into_par_iter()
        .map(|d| {
            irreducibles_of_degree(ring, d)
                .into_iter()
                .map(|pi| factor(&Place::finite_unchecked(ring, pi)))
                .product()
        })
        .collect();
    let mut value: Complex64 = partials.into_iter().product();
    if include_infinity {
        value *= factor(&Place::infinity(ring));
    }
    finish(value, ring.q(), cutoff, tail)
}

/// `ln(1 + z)` without losing `z` to rounding when `|z|` is tiny.
pub fn ln_1p_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        // z - z^2/2 + z^3/3 - z^4/4; the next term is below 1e-20 |z|
        let z2 = z * z;
        z - z2 / 2.0 + z2 * z / 3.0 - z2 * z2 / 4.0
    } else {
        (Complex64::new(1.0, 0.0) + z).ln()
    }
}

/// Euler product for factors that depend only on `q_v`. The closure returns
/// the deviation `factor - 1`, which keeps factors such as `1 - q_v^{-36}`
/// from rounding to 1; degree `d` contributes its log-factor times the number
/// of places of degree `d`.
pub fn euler_product_by_degree<F>(q: u64, deviation: F, cutoff: u32, tail: TailModel) -> EulerProduct
where
    F: Fn(f64) -> Complex64,
{
    let mut log = Complex64::new(0.0, 0.0);
    for d in 1..=cutoff {
        let count = necklace_count(q, d);
        let q_v = (q as f64).powi(d as i32);
        log += ln_1p_complex(deviation(q_v)) * count as f64;
    }
    finish(log.exp(), q, cutoff, tail)
}
