// EC, volume, surface area and edge-length curves of a random volume.
use ecurve::descriptors::{builtin_weights, descriptor_curves, Connectivity, Descriptor};
use ecurve::{gather_3d_parallel, random_field_3d, Dimension, Distribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = random_field_3d(24, 24, 24, Distribution::Uniform, 4, 31)?;
    let map = gather_3d_parallel(&field, 2)?;

    let tables = [
        Descriptor::Ec,
        Descriptor::Volume,
        Descriptor::SurfaceArea,
        Descriptor::Perimeter,
    ]
    .into_iter()
    .map(|d| builtin_weights(d, Connectivity::C26, Dimension::Three))
    .collect::<Result<Vec<_>, _>>()?;
    let curves = descriptor_curves(&map, &tables)?;

    println!("level,ec_26c,volume,surface_area,perimeter");
    for level in 0..=31 {
        let row: Vec<String> = curves.iter().map(|c| c.format_value(level)).collect();
        println!("{level},{}", row.join(","));
    }
    // the full box at the top level
    assert_eq!(curves[0].value(31), 1.0);
    assert_eq!(curves[1].value(31), 24.0 * 24.0 * 24.0);
    assert_eq!(curves[2].value(31), 6.0 * 24.0 * 24.0);
    assert_eq!(curves[3].value(31), 12.0 * 24.0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("volume_3d");
}
