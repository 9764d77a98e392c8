// Contribution-map curves against per-level brute force counting.
use ecurve::descriptors::{builtin_weights, descriptor_curve, Connectivity, Descriptor};
use ecurve::oracle::{curve_bruteforce_2d, curve_bruteforce_3d, Oracle2D, Oracle3D};
use ecurve::{
    gather_2d_serial, gather_3d_serial, random_field_2d, random_field_3d, Dimension, Distribution,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = random_field_2d(20, 17, Distribution::Uniform, 1, 9)?;
    let m2 = gather_2d_serial(&f2)?;
    for (d, c, o) in [
        (Descriptor::Ec, Connectivity::C8, Oracle2D::Ec8),
        (Descriptor::Ec, Connectivity::C4, Oracle2D::Ec4),
        (Descriptor::Perimeter, Connectivity::C8, Oracle2D::Perimeter),
        (Descriptor::Area, Connectivity::C8, Oracle2D::Area),
    ] {
        let fast = descriptor_curve(&m2, &builtin_weights(d, c, Dimension::Two)?)?;
        let slow: Vec<i64> = curve_bruteforce_2d(&f2, o).iter().map(|v| v * 8).collect();
        assert_eq!(fast.eighths(), &slow[..], "{o:?}");
        println!("2D {o:?}: {} levels agree", slow.len());
    }

    let f3 = random_field_3d(7, 6, 5, Distribution::Normal, 2, 6)?;
    let m3 = gather_3d_serial(&f3)?;
    for (d, o) in [
        (Descriptor::Ec, Oracle3D::Ec26),
        (Descriptor::Volume, Oracle3D::Volume),
        (Descriptor::SurfaceArea, Oracle3D::SurfaceArea),
        (Descriptor::Perimeter, Oracle3D::SharpEdgePerimeter),
    ] {
        let fast = descriptor_curve(
            &m3,
            &builtin_weights(d, Connectivity::C26, Dimension::Three)?,
        )?;
        let slow: Vec<i64> = curve_bruteforce_3d(&f3, o).iter().map(|v| v * 8).collect();
        assert_eq!(fast.eighths(), &slow[..], "{o:?}");
        println!("3D {o:?}: {} levels agree", slow.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("oracle_check");
}
