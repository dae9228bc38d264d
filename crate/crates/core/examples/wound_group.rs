// The group of norm-one classes (F^{1/p})^x / F^x: points, the group law,
// heights and local metrics.

use woundcount::gf::Field;
use woundcount::polyfield::places_up_to;
use woundcount::wound::WoundGroup;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = WoundGroup::new(Field::prime(3)?);
    // x = (1, t, 1): f(x) = 1 + t * t^3 + t^2 = t^4 + t^2 + 1
    let x = g.point_from_ints(&[&[1], &[0, 1], &[1]])?;
    let y = g.point_from_ints(&[&[0, 1], &[1], &[]])?;
    println!("x = {}, f(x) = {}, height q^{}", g.format_point(&x), g.ring().format(x.norm()), g.height(&x));
    let xy = g.mul(&x, &y);
    println!("x * y = {}", g.format_point(&xy));
    println!("x^-1 = {}", g.format_point(&g.inv(&x)));
    assert_eq!(g.pow(&x, 3), g.identity());

    let places = places_up_to(g.ring(), 2);
    for v in places.iter().filter(|v| g.local_metric(v, &xy).exponent > 0) {
        println!("  m_v(x y) = {} at v = {v}", g.local_metric(v, &xy).exponent);
    }
    assert_eq!(g.height_by_places(&xy, &places)?, g.height(&xy));
    println!("point as JSON: {}", serde_json::to_string(&g.point_json(&x))?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
