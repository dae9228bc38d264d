// Pole invariants for multiples of the anticanonical class and the
// Tauberian main term against actual counts.

use num_complex::Complex64;
use num_rational::Ratio;
use woundcount::counting::{Counter, Method};
use woundcount::denef::leading_constant;
use woundcount::gf::Field;
use woundcount::poles::{averaged_asymptotic, pole_structure, tauberian_predict, BundleClass};
use woundcount::wound::WoundGroup;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for lambda in [Ratio::new(1, 1), Ratio::new(2, 1), Ratio::new(1, 2)] {
        let cls = BundleClass::new(2, vec![lambda], vec![1])?;
        let ps = pole_structure(&cls, 2);
        println!("lambda = {lambda}: {}", serde_json::to_string(&ps)?);
    }

    let c = leading_constant(2, 2, 40).closed_form;
    let table = Counter::new(WoundGroup::new(Field::prime(2)?)).count_table(0..=14, Method::Structured).map_err(|(_, e)| e)?;
    for m in 8..=14 {
        let predicted = tauberian_predict(Ratio::from_integer(1), 1, Ratio::from_integer(1), &[Complex64::new(c, 0.0)], 2, m)?;
        println!("M={m}: N={} predicted {predicted:.1}", table.get(m).unwrap_or(0));
    }
    println!("averaged main term at M=12: {}", averaged_asymptotic(c, Ratio::from_integer(1), 1, Ratio::from_integer(1), 2, 12)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
