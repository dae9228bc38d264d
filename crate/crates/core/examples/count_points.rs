// N(M): rational points of height exactly q^M, compared with the naive
// enumerator and with the predicted growth (1 - q^(1-p)) q^M.

use woundcount::counting::{empirical_constant, zeta_partial, Counter, Method};
use woundcount::gf::Field;
use woundcount::wound::WoundGroup;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = WoundGroup::new(Field::prime(2)?);
    let counter = Counter::new(g.clone());
    for x in counter.enumerate_points(3)? {
        println!("height 2^3: {}", g.format_point(&x));
    }
    let table = counter.count_table(0..=12, Method::Structured).map_err(|(_, e)| e)?;
    print!("{}", table.to_csv());
    for m in 0..=5 {
        assert_eq!(counter.count_points_naive(m)?, table.get(m).unwrap_or(0));
    }
    println!("N(M)/q^M over M = 8..12: {:.4}", empirical_constant(&table, 8, 12)?);
    let z = zeta_partial(&table, num_complex::Complex64::new(1.5, 0.0));
    println!("partial height zeta at 1.5: {}", serde_json::to_string(&z)?);

    let twice = table.rescaled(2);
    let odd: Vec<u64> = twice.rows.iter().filter(|r| r.m % 2 == 1).map(|r| r.n).collect();
    println!("counts for 2 rho at odd M: {odd:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
