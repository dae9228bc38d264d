use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::polyfield::{euler_product_by_degree, zeta_residue, TailModel};

/// Volume of `G(F_inf)`, summed over the reduction classes: the `q^j`
/// classes whose top unit coordinate has index `j` each carry
/// `q^{-(p-1)} |f(x)|_inf^{-1} = q^{-(p-1)} q^{-j}`.
pub fn infinite_local_volume(p: u32, q: u64) -> BigRational {
    let q = BigInt::from(q);
    let base = BigRational::from_integer(num_traits::pow(q.clone(), (p - 1) as usize)).recip();
    (0..p as usize).fold(BigRational::zero(), |acc, j| {
        let classes = BigRational::from_integer(num_traits::pow(q.clone(), j));
        let weight = BigRational::from_integer(num_traits::pow(q.clone(), j)).recip();
        acc + classes * &base * weight
    })
}

/// Every factor of the leading constant `c` in `N(M) ~ c log(q) q^M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantReport {
    pub p: u32,
    pub q: u64,
    pub truncation_degree: u32,
    /// `1 / |Pic G|`.
    pub alpha_star: f64,
    /// `|Pic G|`.
    pub tau: u32,
    /// `q^{p-1}`, from `q^{-dim G (g - 1)}` with genus 0.
    pub normalization: f64,
    pub zeta_residue: f64,
    pub c_infinity: f64,
    pub finite_product: f64,
    pub finite_product_tail_bound: f64,
    pub assembled: f64,
    pub closed_form: f64,
    /// Truncation error bound plus a floating-point rounding allowance.
    pub tail_bound: f64,
    pub rounding_allowance: f64,
    pub gap: f64,
}

impl ConstantReport {
    pub fn within_tail_bound(&self) -> bool {
        self.gap <= self.tail_bound
    }
}

/// Assembles `c = (1/p) q^{p-1} res zeta_F C_inf prod_{deg v <= D} C_v`
/// with `C_v = (1 - 1/q_v)(1 + ... + q_v^{-(p-1)}) = 1 - q_v^{-p}`.
pub fn leading_constant(p: u32, q: u64, truncation: u32) -> ConstantReport {
    let qf = q as f64;
    let pf = p as f64;
    let normalization = qf.powi(p as i32 - 1);
    let residue = zeta_residue(q);
    let c_infinity = (1.0 - 1.0 / qf) * pf * qf.powi(1 - p as i32);
    // |C_v - 1| = q_v^{-p} = q_v^{-1-(p-1)}
    let tail = TailModel::new((p - 1) as f64, 1.0).expect("p >= 2");
    let product = euler_product_by_degree(
        q,
        |q_v| Complex64::new(-q_v.powi(-(p as i32)), 0.0),
        truncation,
        tail,
    );
    let prefactor = normalization * residue * c_infinity / pf;
    let assembled = prefactor * product.value.re;
    let closed_form = (1.0 - qf.powi(1 - p as i32)) / qf.ln();
    // log-space accumulation over `truncation` degrees, one exp, a handful of products
    let rounding_allowance = (truncation as f64 + 16.0) * f64::EPSILON * assembled;
    ConstantReport {
        p,
        q,
        truncation_degree: truncation,
        alpha_star: 1.0 / pf,
        tau: p,
        normalization,
        zeta_residue: residue,
        c_infinity,
        finite_product: product.value.re,
        finite_product_tail_bound: product.tail_bound,
        assembled,
        closed_form,
        tail_bound: prefactor * product.tail_bound + rounding_allowance,
        rounding_allowance,
        gap: (assembled - closed_form).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_examples() {
        assert_eq!(infinite_local_volume(2, 2), BigRational::from_integer(1.into()));
        assert_eq!(
            infinite_local_volume(3, 3),
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
        for (p, q) in [(2u32, 4u64), (3, 9), (5, 5), (7, 7)] {
            let v = infinite_local_volume(p, q);
            let scaled = v * BigRational::from_integer(num_traits::pow(BigInt::from(q), (p - 1) as usize));
            assert_eq!(scaled, BigRational::from_integer(BigInt::from(p)));
        }
    }

    #[test]
    fn constant_limits() {
        let r = leading_constant(3, 3, 12);
        assert!((r.assembled * 3f64.ln() - 8.0 / 9.0).abs() < 1e-10);
        assert!(r.gap < 1e-6);
        assert!(r.within_tail_bound());
        let r = leading_constant(2, 2, 12);
        assert!((r.closed_form * 2f64.ln() - 0.5).abs() < 1e-15);
        assert!(r.within_tail_bound());
        let r = leading_constant(2, 2, 30);
        assert!(r.gap < 1e-9 && r.within_tail_bound());
    }

    #[test]
    fn report_factors_positive() {
        let r = leading_constant(2, 4, 6);
        for x in [r.normalization, r.zeta_residue, r.c_infinity, r.finite_product, r.assembled] {
            assert!(x > 0.0);
        }
        let v = serde_json::to_value(&r).unwrap();
        assert!(v["c_infinity"].is_number());
        assert_eq!(v["tau"], 2);
    }
}
