// Sums of phi(u pi^{-nd} w^d) over local units, against 1 - 1/q_v, -1/q_v and 0.

use woundcount::charsum::{lemma_value, unit_character_sum, LaurentTruncation, SumMethod};
use woundcount::gf::Field;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for field in [Field::prime(2)?, Field::prime(3)?, Field::new(2, 2)?, Field::prime(5)?] {
        let q = field.order();
        let u = LaurentTruncation::new(&field, 0, vec![field.one(), field.one()]);
        for (n, d) in [(1, 0), (1, 1), (2, 1), (1, 2), (3, 3)] {
            let e = n * d + 1;
            let fibered = unit_character_sum(&u, n, d, e, SumMethod::Fibered, None)?;
            let exhaustive = unit_character_sum(&u, n, d, e, SumMethod::Exhaustive, Some(1_000_000)).ok();
            println!(
                "q_v={q} n={n} d={d}: {:+.6} (table {:+.6}, exhaustive {}){}",
                fibered.value.re,
                lemma_value(q as u64, n, d),
                exhaustive.map_or("skipped".to_string(), |r| format!("{:+.6}", r.value.re)),
                if fibered.validated { "" } else { " [p | d]" }
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
