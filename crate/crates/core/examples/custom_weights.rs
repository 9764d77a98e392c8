// A user-supplied weight table: counting corners of the sublevel sets.
//
// Convex corners are single-face vertices and concave ones are three-face
// vertices; diagonal pairs count as two corners of each kind.
use ecurve::descriptors::{descriptor_curve, WeightTable};
use ecurve::{gather_2d_serial, Field2D};

const CORNERS: &str = r#"{
    "name": "corners",
    "dimension": 2,
    "connectivity": "8C",
    "weights": { "q1": 8, "qd": 16, "q3": 8 }
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = WeightTable::from_json(CORNERS)?;
    // an L-shaped tromino at level 0 and the full 2x2 square at level 1
    let field = Field2D::new(2, 2, vec![0, 1, 0, 0], 1)?;
    let curve = descriptor_curve(&gather_2d_serial(&field)?, &table)?;
    println!("level,corners");
    for level in 0..curve.len() {
        println!("{level},{}", curve.format_value(level));
    }
    assert_eq!(curve.values(), vec![6.0, 4.0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("custom_weights");
}
