// Splitting a gather over worker threads gives the same map as the serial pass.
use std::time::Instant;

use ecurve::{gather_2d_parallel, gather_2d_serial, random_field_2d, Distribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = random_field_2d(512, 512, Distribution::Uniform, 7, 255)?;
    let serial = gather_2d_serial(&field)?;
    for workers in [1, 2, 3, 4, 8] {
        let t = Instant::now();
        let map = gather_2d_parallel(&field, workers)?;
        println!(
            "workers={workers} {:.2} ms",
            t.elapsed().as_secs_f64() * 1e3
        );
        assert_eq!(map, serial);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("parallel_gather");
}
