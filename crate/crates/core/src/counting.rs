//! Counting points of `G(F)` of exact anticanonical height `q^M`.
//!
//! The structured enumerator uses the shape of the norm form: the degrees
//! `p * deg x_i + i` are pairwise distinct mod `p`, so `deg f(x) = M` forces
//! `deg x_j = (M - j)/p` for `j = M mod p` and `p * deg x_i + i < M` for the
//! other indices. Work is split by degree vector `(deg x_0, ..., deg x_{p-1})`.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::Elem;
use crate::polyfield::{Poly, PolyRing};
use crate::wound::{GroupPoint, WoundGroup};

/// Default cap on enumerated tuples.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("height {m} needs {needed} candidate tuples, budget is {budget}")]
    BudgetExceeded { m: u32, needed: u64, budget: u64 },
    #[error("count table has no entry for M = {0}")]
    MissingEntry(u32),
    #[error("empty window")]
    EmptyWindow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Structured,
    Naive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Structured => "structured",
            Method::Naive => "naive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountRow {
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u64,
}

/// `N(M)` over a range of heights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountTable {
    pub p: u32,
    pub q: u64,
    pub method: Method,
    pub rows: Vec<CountRow>,
}

impl CountTable {
    pub fn new(p: u32, q: u64, method: Method, rows: Vec<CountRow>) -> CountTable {
        CountTable { p, q, method, rows }
    }

    pub fn get(&self, m: u32) -> Option<u64> {
        self.rows.iter().find(|r| r.m == m).map(|r| r.n)
    }

    pub fn max_m(&self) -> Option<u32> {
        self.rows.iter().map(|r| r.m).max()
    }

    /// CSV with header `M,N,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,N,method\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.m, r.n, self.method.as_str());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Counts for `lambda = k * rho`, where `H_{k rho} = H^k`:
    /// `N_{k rho}(M) = N(M/k)` when `k | M` and 0 otherwise.
    pub fn rescaled(&self, k: u32) -> CountTable {
        let max = self.max_m().unwrap_or(0);
        let rows = (0..=max * k)
            .filter_map(|m| {
                if m % k == 0 {
                    self.get(m / k).map(|n| CountRow { m, n })
                } else {
                    Some(CountRow { m, n: 0 })
                }
            })
            .collect();
        CountTable::new(self.p, self.q, self.method, rows)
    }
}

/// `N_av(M) = (1/d) sum_{j<d} q^{-a j} N(M + j)`.
pub fn averaged_count(table: &CountTable, a: Ratio<i64>, d: u32, m: u32) -> Result<f64, CountError> {
    if d == 0 {
        return Err(CountError::InvalidParameter("d must be positive".into()));
    }
    let a = *a.numer() as f64 / *a.denom() as f64;
    let q = table.q as f64;
    let mut sum = 0.0;
    for j in 0..d {
        let n = table.get(m + j).ok_or(CountError::MissingEntry(m + j))?;
        sum += q.powf(-a * j as f64) * n as f64;
    }
    Ok(sum / d as f64)
}

/// A partial sum of the height zeta function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaPartial {
    pub s: Complex64,
    pub m_max: u32,
    pub value: Complex64,
}

impl Serialize for ZetaPartial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report {
            s_re: f64,
            s_im: f64,
            #[serde(rename = "M_max")]
            m_max: u32,
            value_re: f64,
            value_im: f64,
        }
        Report {
            s_re: self.s.re,
            s_im: self.s.im,
            m_max: self.m_max,
            value_re: self.value.re,
            value_im: self.value.im,
        }
        .serialize(serializer)
    }
}

/// `sum_{M <= M_max} N(M) q^{-sM}` over the rows of the table.
pub fn zeta_partial(table: &CountTable, s: Complex64) -> ZetaPartial {
    let log_q = (table.q as f64).ln();
    let value = table
        .rows
        .iter()
        .map(|r| (-s * (r.m as f64 * log_q)).exp() * r.n as f64)
        .sum();
    ZetaPartial {
        s,
        m_max: table.max_m().unwrap_or(0),
        value,
    }
}

/// Mean of `N(M) / q^M` over `lo..=hi`.
pub fn empirical_constant(table: &CountTable, lo: u32, hi: u32) -> Result<f64, CountError> {
    if lo > hi {
        return Err(CountError::EmptyWindow);
    }
    let q = table.q as f64;
    let mut sum = 0.0;
    for m in lo..=hi {
        let n = table.get(m).ok_or(CountError::MissingEntry(m))?;
        sum += n as f64 / q.powi(m as i32);
    }
    Ok(sum / (hi - lo + 1) as f64)
}

/// Exact-degree slot in a degree vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Zero,
    /// Exact degree; `monic` for the least-index nonzero coordinate.
    Degree { d: usize, monic: bool },
}

/// Enumerates points of a [`WoundGroup`] by height.
#[derive(Clone, Debug)]
pub struct Counter {
    group: WoundGroup,
    budget: u64,
}

impl Counter {
    pub fn new(group: WoundGroup) -> Counter {
        Counter {
            group,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Counter {
        self.budget = budget;
        self
    }

    pub fn group(&self) -> &WoundGroup {
        &self.group
    }

    fn ring(&self) -> &PolyRing {
        self.group.ring()
    }

    /// Degree vectors with `deg f(x) = M` and a monic canonical coordinate.
    fn degree_vectors(&self, m: u32) -> Vec<Vec<Slot>> {
        let p = self.group.p();
        let m = m as usize;
        let j = m % p;
        let top = (m - j) / p;
        // choices per coordinate: None for zero, Some(d) for exact degree d
        let choices: Vec<Vec<Option<usize>>> = (0..p)
            .map(|i| {
                if i == j {
                    vec![Some(top)]
                } else if i > m {
                    vec![None]
                } else {
                    std::iter::once(None)
                        .chain((0..=(m - i) / p).map(Some))
                        .collect()
                }
            })
            .collect();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(p);
        fn rec(
            choices: &[Vec<Option<usize>>],
            current: &mut Vec<Option<usize>>,
            out: &mut Vec<Vec<Slot>>,
        ) {
            if current.len() == choices.len() {
                let first = current.iter().position(|c| c.is_some());
                let slots = current
                    .iter()
                    .enumerate()
                    .map(|(i, c)| match c {
                        None => Slot::Zero,
                        Some(d) => Slot::Degree {
                            d: *d,
                            monic: Some(i) == first,
                        },
                    })
                    .collect();
                out.push(slots);
                return;
            }
            for &c in &choices[current.len()] {
                current.push(c);
                rec(choices, current, out);
                current.pop();
            }
        }
        rec(&choices, &mut current, &mut out);
        out
    }

    fn slot_size(&self, slot: Slot) -> u64 {
        let q = self.group.q();
        match slot {
            Slot::Zero => 1,
            Slot::Degree { d, monic: true } => q.saturating_pow(d as u32),
            Slot::Degree { d, monic: false } => (q - 1).saturating_mul(q.saturating_pow(d as u32)),
        }
    }

    fn slot_poly(&self, slot: Slot, index: u64) -> Poly {
        match slot {
            Slot::Zero => Poly::zero(),
            Slot::Degree { d, monic: true } => self.ring().monic_from_index(d, index),
            Slot::Degree { d, monic: false } => {
                let q = self.group.q();
                let lead = Elem((1 + index % (q - 1)) as u32);
                let mut coeffs = self.ring().poly_from_index(index / (q - 1)).coeffs().to_vec();
                coeffs.resize(d, Elem::ZERO);
                coeffs.push(lead);
                Poly::from_coeffs(coeffs)
            }
        }
    }

    /// Number of candidate tuples the structured enumerator visits at height `M`.
    pub fn structured_candidates(&self, m: u32) -> u64 {
        self.degree_vectors(m)
            .iter()
            .map(|v| v.iter().fold(1u64, |acc, &s| acc.saturating_mul(self.slot_size(s))))
            .fold(0u64, u64::saturating_add)
    }

    fn check_budget(&self, m: u32, needed: u64) -> Result<(), CountError> {
        if needed > self.budget {
            return Err(CountError::BudgetExceeded {
                m,
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn is_primitive(&self, coords: &[Poly]) -> bool {
        let mut g: Option<Poly> = None;
        for x in coords.iter().filter(|x| !x.is_zero()) {
            if x.degree() == Some(0) {
                return true;
            }
            let next = match g {
                None => x.clone(),
                Some(prev) => self.ring().gcd(&prev, x),
            };
            if next.degree() == Some(0) {
                return true;
            }
            g = Some(next);
        }
        false
    }

    /// Visits every primitive tuple of one degree vector.
    fn for_each_in_vector<F: FnMut(&[Poly])>(&self, slots: &[Slot], mut visit: F) {
        let sizes: Vec<u64> = slots.iter().map(|&s| self.slot_size(s)).collect();
        let lists: Vec<Vec<Poly>> = slots
            .iter()
            .zip(&sizes)
            .map(|(&s, &n)| (0..n).map(|i| self.slot_poly(s, i)).collect())
            .collect();
        let mut idx = vec![0usize; slots.len()];
        let mut tuple: Vec<Poly> = lists.iter().map(|l| l[0].clone()).collect();
        loop {
            if self.is_primitive(&tuple) {
                visit(&tuple);
            }
            // odometer
            let mut k = slots.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < lists[k].len() {
                    tuple[k] = lists[k][idx[k]].clone();
                    break;
                }
                idx[k] = 0;
                tuple[k] = lists[k][0].clone();
            }
        }
    }

    /// All canonical points with `deg f(x) = M`, sorted.
    pub fn enumerate_points(&self, m: u32) -> Result<Vec<GroupPoint>, CountError> {
        self.check_budget(m, self.structured_candidates(m))?;
        let mut points: Vec<GroupPoint> = self
            .degree_vectors(m)
            .par_iter()
            .flat_map_iter(|slots| {
                let mut found = Vec::new();
                self.for_each_in_vector(slots, |t| {
                    found.push(self.group.from_canonical_unchecked(t.to_vec()))
                });
                found
            })
            .collect();
        points.sort();
        Ok(points)
    }

    /// `N(M)` by the structured enumerator.
    pub fn count_points(&self, m: u32) -> Result<u64, CountError> {
        self.check_budget(m, self.structured_candidates(m))?;
        Ok(self
            .degree_vectors(m)
            .par_iter()
            .map(|slots| {
                let mut n = 0u64;
                self.for_each_in_vector(slots, |_| n += 1);
                n
            })
            .sum())
    }

    /// `N(M)` by scanning every tuple with `deg x_i <= floor((M - i)/p) + 1`
    /// and keeping the canonical primitive ones whose norm form has degree `M`.
    pub fn count_points_naive(&self, m: u32) -> Result<u64, CountError> {
        let p = self.group.p() as i64;
        let q = self.group.q();
        // number of coefficients per coordinate
        let lens: Vec<u32> = (0..p)
            .map(|i| ((m as i64 - i).div_euclid(p) + 2).max(0) as u32)
            .collect();
        let sizes: Vec<u64> = lens.iter().map(|&l| q.saturating_pow(l)).collect();
        let total = sizes.iter().fold(1u64, |a, &b| a.saturating_mul(b));
        self.check_budget(m, total)?;
        let ring = self.ring();
        let count = (0..sizes[0])
            .into_par_iter()
            .map(|first| {
                let mut n = 0u64;
                let rest: u64 = sizes[1..].iter().product();
                for r in 0..rest {
                    let mut coords = Vec::with_capacity(sizes.len());
                    coords.push(ring.poly_from_index(first));
                    let mut x = r;
                    for &s in &sizes[1..] {
                        coords.push(ring.poly_from_index(x % s));
                        x /= s;
                    }
                    let Some(lead) = coords.iter().find(|c| !c.is_zero()) else {
                        continue;
                    };
                    if !lead.is_monic() {
                        continue;
                    }
                    if self.group.norm_form(&coords).degree() != Some(m as usize) {
                        continue;
                    }
                    if ring.content(&coords).degree() == Some(0) {
                        n += 1;
                    }
                }
                n
            })
            .sum();
        Ok(count)
    }

    /// `N(M)` for each height in `range`. On a budget failure the rows
    /// computed so far are returned alongside the error.
    pub fn count_table(
        &self,
        range: std::ops::RangeInclusive<u32>,
        method: Method,
    ) -> Result<CountTable, (CountTable, CountError)> {
        let mut table = CountTable::new(self.group.p() as u32, self.group.q(), method, Vec::new());
        for m in range {
            let n = match method {
                Method::Structured => self.count_points(m),
                Method::Naive => self.count_points_naive(m),
            };
            match n {
                Ok(n) => table.rows.push(CountRow { m, n }),
                Err(e) => return Err((table, e)),
            }
        }
        Ok(table)
    }
}
