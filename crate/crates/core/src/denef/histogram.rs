use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{DenefError, DEFAULT_CLASS_BUDGET};
use crate::polyfield::{Place, Poly, PolyRing};
use crate::wound::WoundGroup;

/// Residue classes of `P^{p-1}(F_v)` sorted by `m = v(f(x))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValuationHistogram {
    pub place: Place,
    pub counts: BTreeMap<u32, u64>,
    pub total: u64,
}

impl ValuationHistogram {
    /// `{0: q_v^{p-1}} + {m: q_v^{p-1-m} : 1 <= m < p}`.
    pub fn expected(place: &Place, p: u32) -> BTreeMap<u32, u64> {
        let q_v = place.q_v();
        let mut out = BTreeMap::new();
        out.insert(0, q_v.pow(p - 1));
        for m in 1..p {
            out.insert(m, q_v.pow(p - 1 - m));
        }
        out
    }

    pub fn matches_closed_form(&self, p: u32) -> bool {
        let q_v = self.place.q_v();
        self.counts == Self::expected(&self.place, p) && self.total == (q_v.pow(p) - 1) / (q_v - 1)
    }
}

fn finite_pi(v: &Place) -> Result<&Poly, DenefError> {
    v.pi().ok_or(DenefError::InfinitePlace)
}

/// Enumerates `P^{p-1}(F_v)` with representatives of degree `< d_v`, the
/// first nonzero coordinate equal to 1, and tabulates `v(sum t^i x_i^p)`.
pub fn valuation_histogram(
    group: &WoundGroup,
    v: &Place,
    budget: Option<u64>,
) -> Result<ValuationHistogram, DenefError> {
    let pi = finite_pi(v)?;
    let budget = budget.unwrap_or(DEFAULT_CLASS_BUDGET);
    let p = group.p();
    let q_v = v.q_v();
    let needed = (0..p as u32).fold(0u64, |acc, k| acc.saturating_add(q_v.saturating_pow(k)));
    if needed > budget {
        return Err(DenefError::BudgetExceeded { needed, budget });
    }
    let ring = group.ring();
    // partition by the index of the leading 1
    let parts: Vec<BTreeMap<u32, u64>> = (0..p)
        .into_par_iter()
        .map(|lead| {
            let free = p - 1 - lead;
            let mut counts = BTreeMap::new();
            let mut coords = vec![Poly::zero(); p];
            coords[lead] = Poly::one();
            for idx in 0..q_v.pow(free as u32) {
                let mut x = idx;
                for c in coords.iter_mut().skip(lead + 1) {
                    *c = ring.poly_from_index(x % q_v);
                    x /= q_v;
                }
                let f = group.norm_form(&coords);
                let m = ring.valuation(&f, pi).expect("primitive class has nonzero norm");
                assert!((m as usize) < p, "valuation {m} reached p = {p}");
                *counts.entry(m).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut counts = BTreeMap::new();
    for part in parts {
        for (m, n) in part {
            *counts.entry(m).or_insert(0) += n;
        }
    }
    Ok(ValuationHistogram {
        place: v.clone(),
        counts,
        total: needed,
    })
}

/// True when `map` is injective on `0..domain` and `domain == codomain`.
pub fn check_bijection<K, F>(domain: u64, codomain: u64, mut map: F) -> bool
where
    K: Hash + Eq,
    F: FnMut(u64) -> K,
{
    if domain != codomain {
        return false;
    }
    let mut seen = HashSet::with_capacity(domain as usize);
    (0..domain).all(|i| seen.insert(map(i)))
}

fn tuple_from_index(ring: &PolyRing, p: usize, q_v: u64, mut idx: u64) -> Vec<Poly> {
    (0..p)
        .map(|_| {
            let y = ring.poly_from_index(idx % q_v);
            idx /= q_v;
            y
        })
        .collect()
}

/// Checks that `(y_i) -> sum t^i y_i^p` maps `S_v^p` bijectively onto
/// polynomials of degree `< p d_v`.
pub fn residue_norm_bijection(group: &WoundGroup, v: &Place, budget: Option<u64>) -> Result<bool, DenefError> {
    finite_pi(v)?;
    let budget = budget.unwrap_or(DEFAULT_CLASS_BUDGET);
    let p = group.p();
    let q_v = v.q_v();
    let domain = q_v.saturating_pow(p as u32);
    if domain > budget {
        return Err(DenefError::BudgetExceeded { needed: domain, budget });
    }
    let ring = group.ring();
    let codomain = ring
        .count_below_degree(p as u32 * v.degree())
        .unwrap_or(u64::MAX);
    let in_range = |f: &Poly| f.degree().map_or(true, |d| d < p * v.degree() as usize);
    let mut all_in_range = true;
    let bijective = check_bijection(domain, codomain, |i| {
        let f = group.norm_form(&tuple_from_index(ring, p, q_v, i));
        all_in_range &= in_range(&f);
        f
    });
    Ok(bijective && all_in_range)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    Closed,
    Bruteforce,
}

/// `h_v(0; s)` for the anticanonical height.
///
/// Closed: `1 + sum_{m=1}^{p-1} q_v^{-ms}`. Brute force:
/// `q_v^{-(p-1)} sum_x q_v^{-m(x)(s-1)}` over the valuation histogram.
pub fn local_density(
    group: &WoundGroup,
    v: &Place,
    s: Complex64,
    method: DensityMethod,
) -> Result<Complex64, DenefError> {
    finite_pi(v)?;
    let q_v = Complex64::new(v.q_v() as f64, 0.0);
    let p = group.p() as u32;
    match method {
        DensityMethod::Closed => Ok((0..p).map(|m| q_v.powc(-s * m as f64)).sum()),
        DensityMethod::Bruteforce => {
            let hist = valuation_histogram(group, v, None)?;
            let sum: Complex64 = hist
                .counts
                .iter()
                .map(|(&m, &n)| q_v.powc(-(s - 1.0) * m as f64) * n as f64)
                .sum();
            Ok(sum * q_v.powf(-((p - 1) as f64)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::polyfield::places_up_to;

    fn group(p: u32) -> WoundGroup {
        WoundGroup::new(Field::prime(p).unwrap())
    }

    fn place(g: &WoundGroup, coeffs: &[i64]) -> Place {
        Place::finite(g.ring(), g.ring().from_ints(coeffs)).unwrap()
    }

    fn counts(pairs: &[(u32, u64)]) -> BTreeMap<u32, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn histogram_examples() {
        let g2 = group(2);
        let h = valuation_histogram(&g2, &place(&g2, &[0, 1]), None).unwrap();
        assert_eq!(h.counts, counts(&[(0, 2), (1, 1)]));
        assert_eq!(h.total, 3);
        let h = valuation_histogram(&g2, &place(&g2, &[1, 1, 1]), None).unwrap();
        assert_eq!(h.counts, counts(&[(0, 4), (1, 1)]));
        assert_eq!(h.total, 5);
        let g3 = group(3);
        let h = valuation_histogram(&g3, &place(&g3, &[0, 1]), None).unwrap();
        assert_eq!(h.counts, counts(&[(0, 9), (1, 3), (2, 1)]));
        assert_eq!(h.total, 13);
    }

    #[test]
    fn histogram_closed_form_on_place_sets() {
        for (p, deg) in [(2u32, 3u32), (3, 2), (5, 1)] {
            let g = group(p);
            for v in places_up_to(g.ring(), deg).into_iter().filter(|v| !v.is_infinite()) {
                let h = valuation_histogram(&g, &v, None).unwrap();
                assert!(h.matches_closed_form(p), "p={p} v={v}");
            }
        }
    }

    #[test]
    fn histogram_over_extension_field() {
        let g = WoundGroup::new(Field::new(2, 2).unwrap());
        for v in places_up_to(g.ring(), 2).into_iter().filter(|v| !v.is_infinite()) {
            assert!(valuation_histogram(&g, &v, None).unwrap().matches_closed_form(2));
        }
    }

    #[test]
    fn histogram_budget_and_infinity() {
        let g = group(3);
        let v = place(&g, &[0, 1]);
        assert_eq!(
            valuation_histogram(&g, &v, Some(5)),
            Err(DenefError::BudgetExceeded { needed: 13, budget: 5 })
        );
        let inf = Place::infinity(g.ring());
        assert_eq!(valuation_histogram(&g, &inf, None), Err(DenefError::InfinitePlace));
    }

    #[test]
    fn histogram_json() {
        let g = group(2);
        let h = valuation_histogram(&g, &place(&g, &[0, 1]), None).unwrap();
        let v = serde_json::to_value(&h).unwrap();
        assert_eq!(v["counts"]["0"], 2);
        assert_eq!(v["counts"]["1"], 1);
        assert_eq!(v["total"], 3);
        assert_eq!(v["place"]["kind"], "finite");
    }

    #[test]
    fn bijection_examples() {
        let g2 = group(2);
        assert!(residue_norm_bijection(&g2, &place(&g2, &[0, 1]), None).unwrap());
        let g3 = group(3);
        assert!(residue_norm_bijection(&g3, &place(&g3, &[0, 1]), None).unwrap());
        for (p, deg) in [(2u32, 3u32), (3, 2), (5, 1)] {
            let g = group(p);
            for v in places_up_to(g.ring(), deg).into_iter().filter(|v| !v.is_infinite()) {
                assert!(residue_norm_bijection(&g, &v, None).unwrap(), "p={p} v={v}");
            }
        }
    }

    #[test]
    fn bijection_negative_control() {
        let g = group(3);
        let ring = g.ring();
        let collide = |i: u64| {
            let i = if i == 5 { 4 } else { i };
            g.norm_form(&tuple_from_index(ring, 3, 3, i))
        };
        assert!(!check_bijection(27, 27, collide));
        assert!(!check_bijection(27, 28, |i| i));
        assert!(check_bijection(27, 27, |i| i));
    }

    #[test]
    fn density_examples() {
        let g = group(2);
        let v = place(&g, &[0, 1]);
        let zero = local_density(&g, &v, Complex64::new(0.0, 0.0), DensityMethod::Closed).unwrap();
        assert!((zero - 2.0).norm() < 1e-15);
        let one = local_density(&g, &v, Complex64::new(1.0, 0.0), DensityMethod::Closed).unwrap();
        assert!((one - 1.5).norm() < 1e-15);
        let s = Complex64::new(2.0, 3.0);
        let a = local_density(&g, &v, s, DensityMethod::Closed).unwrap();
        let b = local_density(&g, &v, s, DensityMethod::Bruteforce).unwrap();
        assert!((a - b).norm() < 1e-9);
        let g3 = group(3);
        let w = place(&g3, &[1, 0, 1]);
        let zero = local_density(&g3, &w, Complex64::new(0.0, 0.0), DensityMethod::Bruteforce).unwrap();
        assert!((zero - 3.0).norm() < 1e-12);
    }
}
