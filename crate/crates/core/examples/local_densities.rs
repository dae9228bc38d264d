// Residue classes of P^{p-1}(F_v) by the valuation of the norm form, the
// local density at the trivial character, and the stratified formula.

use num_complex::Complex64;
use woundcount::denef::{
    denef_exact, denef_general, local_density, residue_norm_bijection, valuation_histogram, DensityMethod,
    StratumData,
};
use woundcount::gf::Field;
use woundcount::polyfield::Place;
use woundcount::wound::WoundGroup;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = WoundGroup::new(Field::prime(3)?);
    let v = Place::finite(g.ring(), g.ring().from_ints(&[1, 0, 1]))?;
    let hist = valuation_histogram(&g, &v, None)?;
    println!("{}", serde_json::to_string(&hist)?);
    assert!(hist.matches_closed_form(3));
    println!("residue norm map bijective at {v}: {}", residue_norm_bijection(&g, &v, None)?);

    let s = Complex64::new(1.5, 0.7);
    let closed = local_density(&g, &v, s, DensityMethod::Closed)?;
    let brute = local_density(&g, &v, s, DensityMethod::Bruteforce)?;
    let general = denef_general(&StratumData::wound_example(3, v.q_v()), &[s])?;
    println!("h_v(0; {s}): closed {closed:.6}, from classes {brute:.6}, stratified {general:.6}");

    let control = denef_exact(&StratumData::projective_line(5), &[2])?;
    println!("P^1 control at q_v = 5, s = 2: {control}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
