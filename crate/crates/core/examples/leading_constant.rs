// The leading constant assembled from the residue of zeta, the volume at
// infinity and the truncated product of local factors.

use woundcount::denef::{infinite_local_volume, leading_constant};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (p, q) in [(2u32, 2u64), (3, 3), (2, 4)] {
        println!("p={p} q={q}: volume at infinity {}", infinite_local_volume(p, q));
        for d in [4, 8, 12, 20] {
            let r = leading_constant(p, q, d);
            println!(
                "  D={d:>2}: assembled {:.12} closed {:.12} gap {:.2e} bound {:.2e}",
                r.assembled, r.closed_form, r.gap, r.tail_bound
            );
            assert!(r.within_tail_bound());
        }
    }
    println!("{}", serde_json::to_string_pretty(&leading_constant(3, 3, 12))?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
