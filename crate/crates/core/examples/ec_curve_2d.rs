// EC curve of a small hand-made image in which a hole appears and is then filled.
use ecurve::descriptors::{builtin_weights, descriptor_curve, Connectivity, Descriptor};
use ecurve::{gather_2d_serial, Dimension, Field2D};

pub fn run_example() -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    // a ring of level-1 pixels around a level-3 center, on a level-2 background
    #[rustfmt::skip]
    let values = vec![
        2, 2, 2, 2, 2,
        2, 1, 1, 1, 2,
        2, 1, 3, 1, 2,
        2, 1, 1, 1, 2,
        2, 2, 2, 2, 2,
    ];
    let field = Field2D::new(5, 5, values, 3)?;
    let map = gather_2d_serial(&field)?;
    let ec = descriptor_curve(
        &map,
        &builtin_weights(Descriptor::Ec, Connectivity::C8, Dimension::Two)?,
    )?;

    println!("level,ec_8c");
    for level in 0..ec.len() {
        println!("{level},{}", ec.format_value(level));
    }
    // nothing, then the ring (one component, one hole), then the whole square
    assert_eq!(ec.values(), vec![0.0, 0.0, 0.0, 1.0]);
    Ok(ec.values())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("ec_curve_2d");
}
