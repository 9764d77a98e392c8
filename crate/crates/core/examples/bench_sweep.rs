// Throughput and speedup over worker counts on a generated field.
use ecurve::cli::{bench, RunConfig};
use ecurve::Distribution;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::generate(&[512, 512], Distribution::Uniform, 0);
    cfg.repeats = 3;
    cfg.sweep_workers = vec![1, 2, 4];
    let report = bench(&cfg)?;
    report.write_text(&mut std::io::stdout())?;
    assert_eq!(report.speedup(1), Some(1.0));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bench_sweep");
}
