// All four 2D descriptor curves of a random image from one gather.
use ecurve::descriptors::{builtin_weights, descriptor_curves, Connectivity, Descriptor};
use ecurve::{gather_2d_serial, random_field_2d, Dimension, Distribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = random_field_2d(64, 48, Distribution::Normal, 11, 15)?;
    let map = gather_2d_serial(&field)?;

    let tables = vec![
        builtin_weights(Descriptor::Ec, Connectivity::C8, Dimension::Two)?,
        builtin_weights(Descriptor::Ec, Connectivity::C4, Dimension::Two)?,
        builtin_weights(Descriptor::Perimeter, Connectivity::C8, Dimension::Two)?,
        builtin_weights(Descriptor::Area, Connectivity::C8, Dimension::Two)?,
    ];
    let curves = descriptor_curves(&map, &tables)?;

    println!("level,ec_8c,ec_4c,perimeter,area");
    for level in 0..=15 {
        let row: Vec<String> = curves.iter().map(|c| c.format_value(level)).collect();
        println!("{level},{}", row.join(","));
    }
    let area = &curves[3];
    assert_eq!(area.value(15), (64 * 48) as f64);
    assert!(area.values().windows(2).all(|w| w[0] <= w[1]));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("descriptors_2d");
}
