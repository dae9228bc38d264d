//! The stratified formula
//!
//! `h_v(0; s) = q_v^{-dim X} sum_A prod_{a in A reduced} (q_v - 1)/(q_v^{1+s_a-rho_a} - 1)
//!              * sum_{x in D_A} prod_{b in A non-reduced} q_v^{beta_b(x)(rho_b - s_b)}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::DenefError;

/// One boundary component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryIndex {
    pub rho: i64,
    pub reduced: bool,
    /// Degree over `F_v` of the field of definition of the component.
    pub extension_degree: u32,
}

/// Contribution of one stratum `D_A(F_v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumWeight {
    /// Number of residue classes, for strata avoiding the non-reduced indices.
    Count(u64),
    /// `(exponents, count)` pairs; exponents follow the non-reduced indices of
    /// the stratum in increasing order.
    Histogram(Vec<(Vec<u32>, u64)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub indices: Vec<usize>,
    pub weight: StratumWeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumData {
    pub q_v: u64,
    pub dim_x: u32,
    pub boundary: Vec<BoundaryIndex>,
    pub strata: Vec<Stratum>,
}

impl StratumData {
    /// Checks index ranges, weight shapes and the presence of the open stratum.
    pub fn validate(&self) -> Result<(), DenefError> {
        let bad = |msg: String| Err(DenefError::InvalidStrata(msg));
        if self.q_v < 2 {
            return bad(format!("q_v = {}", self.q_v));
        }
        if !self.strata.iter().any(|s| s.indices.is_empty()) {
            return bad("missing the open stratum".into());
        }
        for (k, b) in self.boundary.iter().enumerate() {
            if b.rho < 1 || b.extension_degree == 0 {
                return bad(format!("boundary index {k}"));
            }
        }
        for st in &self.strata {
            if st.indices.iter().any(|&a| a >= self.boundary.len()) {
                return bad(format!("stratum {:?} out of range", st.indices));
            }
            if st.indices.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("stratum {:?} not strictly increasing", st.indices));
            }
            let nonreduced = self.nonreduced_in(&st.indices).len();
            let nonempty = match &st.weight {
                StratumWeight::Count(n) => {
                    if nonreduced > 0 {
                        return bad(format!("stratum {:?} needs a histogram", st.indices));
                    }
                    *n > 0
                }
                StratumWeight::Histogram(rows) => {
                    if rows.iter().any(|(e, _)| e.len() != nonreduced) {
                        return bad(format!("stratum {:?} histogram arity", st.indices));
                    }
                    rows.iter().any(|(_, n)| *n > 0)
                }
            };
            // a component not defined over F_v has no F_v-points
            if nonempty && st.indices.iter().any(|&a| self.boundary[a].extension_degree > 1) {
                return bad(format!("stratum {:?} meets a non-split component", st.indices));
            }
        }
        Ok(())
    }

    fn nonreduced_in(&self, indices: &[usize]) -> Vec<usize> {
        indices.iter().copied().filter(|&a| !self.boundary[a].reduced).collect()
    }

    /// The wound-group example: `X = P^{p-1}`, one non-reduced component with
    /// `rho = 1`, and the valuation histogram `{m: q_v^{p-1-m}}`.
    pub fn wound_example(p: u32, q_v: u64) -> StratumData {
        let rows = (1..p).map(|m| (vec![m], q_v.pow(p - 1 - m))).collect();
        StratumData {
            q_v,
            dim_x: p - 1,
            boundary: vec![BoundaryIndex {
                rho: 1,
                reduced: false,
                extension_degree: 1,
            }],
            strata: vec![
                Stratum {
                    indices: vec![],
                    weight: StratumWeight::Count(q_v.pow(p - 1)),
                },
                Stratum {
                    indices: vec![0],
                    weight: StratumWeight::Histogram(rows),
                },
            ],
        }
    }

    /// `X = P^1`, `G = G_a`, boundary one reduced point with `rho = 2`.
    pub fn projective_line(q_v: u64) -> StratumData {
        StratumData {
            q_v,
            dim_x: 1,
            boundary: vec![BoundaryIndex {
                rho: 2,
                reduced: true,
                extension_degree: 1,
            }],
            strata: vec![
                Stratum {
                    indices: vec![],
                    weight: StratumWeight::Count(q_v),
                },
                Stratum {
                    indices: vec![0],
                    weight: StratumWeight::Count(1),
                },
            ],
        }
    }
}

const POLE_EPS: f64 = 1e-12;

/// Complex evaluation; `s` holds one value per boundary index.
pub fn denef_general(data: &StratumData, s: &[Complex64]) -> Result<Complex64, DenefError> {
    data.validate()?;
    if s.len() != data.boundary.len() {
        return Err(DenefError::WrongArity {
            expected: data.boundary.len(),
            got: s.len(),
        });
    }
    let q = Complex64::new(data.q_v as f64, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for st in &data.strata {
        let mut factor = Complex64::new(1.0, 0.0);
        for &a in &st.indices {
            let b = &data.boundary[a];
            if b.reduced {
                let den = q.powc(s[a] + 1.0 - b.rho as f64) - 1.0;
                if den.norm() < POLE_EPS {
                    return Err(DenefError::FactorPole(a));
                }
                factor *= (q - 1.0) / den;
            }
        }
        let inner = match &st.weight {
            StratumWeight::Count(n) => Complex64::new(*n as f64, 0.0),
            StratumWeight::Histogram(rows) => {
                let nr = data.nonreduced_in(&st.indices);
                rows.iter()
                    .map(|(exps, n)| {
                        nr.iter()
                            .zip(exps)
                            .map(|(&b, &e)| q.powc((data.boundary[b].rho as f64 - s[b]) * e as f64))
                            .product::<Complex64>()
                            * *n as f64
                    })
                    .sum()
            }
        };
        total += factor * inner;
    }
    Ok(total * q.powf(-(data.dim_x as f64)))
}

fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    let r = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        r.recip()
    } else {
        r
    }
}

/// Exact evaluation at integer `s`.
pub fn denef_exact(data: &StratumData, s: &[i64]) -> Result<BigRational, DenefError> {
    data.validate()?;
    if s.len() != data.boundary.len() {
        return Err(DenefError::WrongArity {
            expected: data.boundary.len(),
            got: s.len(),
        });
    }
    let q = BigRational::from_integer(BigInt::from(data.q_v));
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for st in &data.strata {
        let mut factor = BigRational::one();
        for &a in &st.indices {
            let b = &data.boundary[a];
            if b.reduced {
                let den = rational_pow(&q, 1 + s[a] - b.rho) - &one;
                if den.is_zero() {
                    return Err(DenefError::FactorPole(a));
                }
                factor *= (&q - &one) / den;
            }
        }
        let inner = match &st.weight {
            StratumWeight::Count(n) => BigRational::from_integer(BigInt::from(*n)),
            StratumWeight::Histogram(rows) => {
                let nr = data.nonreduced_in(&st.indices);
                rows.iter()
                    .map(|(exps, n)| {
                        let mut term = BigRational::from_integer(BigInt::from(*n));
                        for (&b, &e) in nr.iter().zip(exps) {
                            term *= rational_pow(&q, e as i64 * (data.boundary[b].rho - s[b]));
                        }
                        term
                    })
                    .fold(BigRational::zero(), |acc, t| acc + t)
            }
        };
        total += factor * inner;
    }
    Ok(total * rational_pow(&q, -(data.dim_x as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn open_stratum_only() {
        let data = StratumData {
            q_v: 5,
            dim_x: 2,
            boundary: vec![],
            strata: vec![Stratum {
                indices: vec![],
                weight: StratumWeight::Count(7),
            }],
        };
        assert_eq!(denef_exact(&data, &[]).unwrap(), ratio(7, 25));
        let z = denef_general(&data, &[]).unwrap();
        assert!((z.re - 7.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn wound_example_specializes() {
        for (p, q_v) in [(2u32, 2u64), (2, 8), (3, 3), (3, 9), (5, 5)] {
            let data = StratumData::wound_example(p, q_v);
            for s in [Complex64::new(2.0, 0.0), Complex64::new(0.5, 1.7), Complex64::new(3.0, -2.0)] {
                let closed: Complex64 = (0..p).map(|m| Complex64::new(q_v as f64, 0.0).powc(-s * m as f64)).sum();
                let got = denef_general(&data, &[s]).unwrap();
                assert!((got - closed).norm() < 1e-12 * closed.norm());
            }
            for s in 0..4i64 {
                let closed = (0..p as i64).fold(BigRational::zero(), |acc, m| {
                    acc + rational_pow(&BigRational::from_integer(BigInt::from(q_v)), -m * s)
                });
                assert_eq!(denef_exact(&data, &[s]).unwrap(), closed);
            }
        }
    }

    #[test]
    fn projective_line_control() {
        for q_v in [2u64, 3, 4, 7] {
            let data = StratumData::projective_line(q_v);
            assert_eq!(denef_exact(&data, &[2]).unwrap(), ratio(q_v as i64 + 1, q_v as i64));
            let z = denef_general(&data, &[Complex64::new(2.0, 0.0)]).unwrap();
            assert!((z.re - (q_v as f64 + 1.0) / q_v as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn factor_pole() {
        let data = StratumData::projective_line(3);
        assert_eq!(denef_exact(&data, &[1]), Err(DenefError::FactorPole(0)));
        let period = 2.0 * std::f64::consts::PI / 3f64.ln();
        assert_eq!(
            denef_general(&data, &[Complex64::new(1.0, period)]),
            Err(DenefError::FactorPole(0))
        );
    }

    #[test]
    fn validation() {
        let mut data = StratumData::wound_example(2, 2);
        data.strata.remove(0);
        assert!(matches!(denef_exact(&data, &[2]), Err(DenefError::InvalidStrata(_))));
        let mut data = StratumData::wound_example(2, 2);
        data.strata[1].weight = StratumWeight::Count(1);
        assert!(matches!(denef_exact(&data, &[2]), Err(DenefError::InvalidStrata(_))));
        let mut data = StratumData::projective_line(2);
        data.boundary[0].extension_degree = 2;
        assert!(matches!(denef_exact(&data, &[2]), Err(DenefError::InvalidStrata(_))));
        data.strata[1].weight = StratumWeight::Count(0);
        assert_eq!(denef_exact(&data, &[2]).unwrap(), ratio(1, 1));
        assert_eq!(
            denef_exact(&StratumData::projective_line(2), &[]),
            Err(DenefError::WrongArity { expected: 1, got: 0 })
        );
    }
}
