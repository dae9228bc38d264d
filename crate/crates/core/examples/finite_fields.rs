// Arithmetic in F_4 and F_9, and the moduli chosen for them.

use woundcount::gf::{Field, FieldElement};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f4 = Field::new(2, 2)?;
    println!("F_4 modulus (low first): {:?}", f4.modulus());
    let w = FieldElement::new(&f4, f4.generator());
    let w2 = w.pow(2);
    // w^2 = w + 1
    println!("w = {w}, w^2 = {w2}, w^3 = {}", w.pow(3));
    assert_eq!(w2, w.checked_add(&FieldElement::new(&f4, f4.one()))?);

    let f9 = Field::new(3, 2)?;
    for a in f9.elements().skip(1) {
        assert_eq!(f9.mul(a, f9.inv(a)?), f9.one());
    }
    let traces: Vec<u32> = f9.elements().map(|a| f9.trace(a)).collect();
    println!("traces over F_9: {traces:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
