// Places of F_2(t), valuations, and the zeta function as an Euler product.

use num_complex::Complex64;
use woundcount::polyfield::{
    euler_product, necklace_count, places_up_to, zeta_closed, zeta_residue, Place, PolyRing, RationalFunction,
    TailModel,
};
use woundcount::gf::Field;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ring = PolyRing::new(Field::prime(2)?);
    let places = places_up_to(&ring, 4);
    for d in 1..=4 {
        let listed: Vec<String> = places
            .iter()
            .filter(|v| !v.is_infinite() && v.degree() == d)
            .map(|v| v.to_string())
            .collect();
        println!("degree {d}: {} places (necklace count {}): {}", listed.len(), necklace_count(2, d), listed.join(", "));
    }

    // (t^2 + t) / (t + 1)^3 at t, t + 1 and infinity
    let f = RationalFunction::new(&ring, &ring.from_ints(&[0, 1, 1]), &ring.from_ints(&[1, 1]).clone())?;
    for v in [Place::finite(&ring, ring.t())?, Place::finite(&ring, ring.from_ints(&[1, 1]))?, Place::infinity(&ring)] {
        println!("v = {v}: valuation {}, |f|_v = {}", v.valuation(&f)?, v.abs_value(&f)?);
    }

    let s = Complex64::new(2.0, 0.0);
    let tail = TailModel::new(1.0, 2.0)?;
    let ep = euler_product(&ring, |v| (Complex64::new(1.0, 0.0) - (v.q_v() as f64).powf(-2.0)).inv(), 10, true, tail);
    let exact = zeta_closed(2, s)?;
    println!("zeta(2): product {:.8} vs closed {:.8}, bound {:.1e}", ep.value.re, exact.re, ep.tail_bound);
    println!("residue at s = 1: {:.6}", zeta_residue(2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
