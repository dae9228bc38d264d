use std::sync::Arc;

use num_complex::Complex64;
use num_traits::One;
use proptest::prelude::*;

use woundcount::charsum::{phi_character, LaurentTruncation};
use woundcount::counting::Counter;
use woundcount::denef::{local_density, valuation_histogram, DensityMethod};
use woundcount::gf::{Elem, Field};
use woundcount::poles::{pole_structure, BundleClass};
use woundcount::polyfield::{
    places_dividing, places_up_to, product_of_abs_values, Place, Poly, PolyRing, RationalFunction,
};
use woundcount::wound::WoundGroup;

fn fields() -> Vec<Arc<Field>> {
    vec![
        Field::prime(2).unwrap(),
        Field::prime(3).unwrap(),
        Field::prime(5).unwrap(),
        Field::new(2, 2).unwrap(),
        Field::new(3, 2).unwrap(),
        Field::new(2, 3).unwrap(),
    ]
}

fn elem(f: &Field, k: u32) -> Elem {
    f.elem(k % f.order()).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(which in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = &fields()[which];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
        // Frobenius is additive
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
    }

    #[test]
    fn product_formula(p in prop::sample::select(vec![2u32, 3, 5]), num in prop::collection::vec(0u32..5, 1..10), den in prop::collection::vec(0u32..5, 1..10)) {
        let ring = PolyRing::new(Field::prime(p).unwrap());
        let to_poly = |c: &[u32]| Poly::from_coeffs(c.iter().map(|&x| elem(ring.field(), x)).collect());
        let (n, d) = (to_poly(&num), to_poly(&den));
        prop_assume!(!n.is_zero() && !d.is_zero());
        let f = RationalFunction::new(&ring, &n, &d).unwrap();
        let table = places_up_to(&ring, 5);
        let mut places = vec![Place::infinity(&ring)];
        for g in [f.numerator(), f.denominator()] {
            if g.degree().unwrap_or(0) > 0 {
                places.extend(places_dividing(&ring, g, &table).unwrap().into_iter().map(|(v, _)| v));
            }
        }
        prop_assert!(product_of_abs_values(&places, &f).unwrap().is_one());
    }

    #[test]
    fn heights_and_metrics(p in prop::sample::select(vec![2u32, 3]), coords in prop::collection::vec(prop::collection::vec(0u32..3, 0..4), 3)) {
        let g = WoundGroup::new(Field::prime(p).unwrap());
        let ring = g.ring().clone();
        let polys: Vec<Poly> = coords.iter().take(p as usize)
            .map(|c| Poly::from_coeffs(c.iter().map(|&x| elem(ring.field(), x)).collect()))
            .collect();
        prop_assume!(polys.iter().any(|x| !x.is_zero()));
        let x = g.make_point(polys).unwrap();
        let table = places_up_to(&ring, 8);
        prop_assert_eq!(g.height_by_places(&x, &table).unwrap(), g.height(&x));
        for v in &table {
            prop_assert!(g.local_metric(v, &x).exponent < p, "metric at {} reaches p", v);
        }
        // the boundary has no rational points: f(x) never vanishes
        prop_assert!(!x.norm().is_zero());
        prop_assert_eq!(g.pow(&x, p as u64), g.identity());
    }

    #[test]
    fn group_law(seed in 0usize..10_000) {
        let g = WoundGroup::new(Field::prime(3).unwrap());
        let points: Vec<_> = (0..=4).flat_map(|m| Counter::new(g.clone()).enumerate_points(m).unwrap()).collect();
        let pick = |k: usize| &points[(seed * 7919 + k * 104_729) % points.len()];
        let (a, b, c) = (pick(1), pick(2), pick(3));
        prop_assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
        prop_assert_eq!(g.mul(a, b), g.mul(b, a));
        prop_assert_eq!(g.mul(a, &g.inv(a)), g.identity());
    }

    #[test]
    fn density_routes_agree(re in 0.1f64..4.0, im in -6.0f64..6.0, which in 0usize..4) {
        let g = WoundGroup::new(Field::prime(2).unwrap());
        let places: Vec<Place> = places_up_to(g.ring(), 2).into_iter().filter(|v| !v.is_infinite()).collect();
        let v = &places[which % places.len()];
        let s = Complex64::new(re, im);
        let a = local_density(&g, v, s, DensityMethod::Closed).unwrap();
        let b = local_density(&g, v, s, DensityMethod::Bruteforce).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn phi_is_an_additive_character(which in 0usize..6, xs in prop::collection::vec(any::<u32>(), 4), ys in prop::collection::vec(any::<u32>(), 4)) {
        let f = &fields()[which];
        let x = LaurentTruncation::new(f, -2, xs.iter().map(|&k| elem(f, k)).collect());
        let y = LaurentTruncation::new(f, -2, ys.iter().map(|&k| elem(f, k)).collect());
        let sum = x.add(&y).unwrap();
        let (px, py, ps) = (phi_character(&x).unwrap(), phi_character(&y).unwrap(), phi_character(&sum).unwrap());
        prop_assert!((px.norm() - 1.0).abs() < 1e-12);
        prop_assert!((ps - px * py).norm() < 1e-12);
    }

    #[test]
    fn pole_scaling(k in 1i64..6, num in 1i64..8, exp in 0u32..3) {
        let lambda = num_rational::Ratio::new(num, 2i64.pow(exp));
        let base = BundleClass::new(2, vec![lambda, num_rational::Ratio::from_integer(1)], vec![1, 2]).unwrap();
        let scaled = base.scaled(num_rational::Ratio::from_integer(k)).unwrap();
        let (a, b) = (pole_structure(&base, 2), pole_structure(&scaled, 2));
        prop_assert_eq!(b.a, a.a / k);
        prop_assert_eq!(&b.a_indices, &a.a_indices);
        prop_assert_eq!(b.b, a.b);
        prop_assert!(b.b >= 1 && b.pole_count() as i64 == b.d.ceil().to_integer());
    }
}

#[test]
fn histograms_for_extension_residue_fields() {
    // F_4(t): degree-1 places have q_v = 4
    let g = WoundGroup::new(Field::new(2, 2).unwrap());
    for v in places_up_to(g.ring(), 1).into_iter().filter(|v| !v.is_infinite()) {
        let h = valuation_histogram(&g, &v, None).unwrap();
        assert!(h.matches_closed_form(2), "{v}");
    }
}

#[test]
fn integral_classes_use_plain_gcds() {
    let cls = BundleClass::new(3, vec![6.into(), 4.into()], vec![3, 2]).unwrap();
    let ps = pole_structure(&cls, 3);
    assert!(cls.is_integral());
    assert_eq!(ps.g, 2.into());
    assert_eq!(ps.d, 2.into());
    assert_eq!(ps.pole_count(), 2);
}
