// A 16-bit raw volume with a sidecar description, run through the CLI layer.
use ecurve::cli::{run_curve, RunConfig};
use ecurve::ingest::{Element, VolumeSpec};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("ramp.raw");
    let (w, h, d) = (6usize, 5usize, 4usize);

    // a radial ramp, stored (i, j, k) with k fastest
    let mut bytes = Vec::with_capacity(w * h * d * 2);
    for i in 0..h {
        for j in 0..w {
            for k in 0..d {
                let r2 = (i * i + j * j + k * k) as u16;
                bytes.extend_from_slice(&(r2 * 100).to_le_bytes());
            }
        }
    }
    std::fs::write(&path, bytes)?;
    let spec = VolumeSpec {
        w,
        h,
        d,
        element: Element::U16,
        max_level: 8,
        range: Some((0.0, 5000.0)),
    };
    std::fs::write(path.with_extension("json"), serde_json::to_string(&spec)?)?;

    let mut cfg = RunConfig::file(&path);
    cfg.descriptors = vec!["ec".parse()?, "volume".parse()?];
    let mut in_memory = Vec::new();
    run_curve(&cfg, &mut in_memory)?;

    cfg.low_memory = true;
    let mut streamed = Vec::new();
    run_curve(&cfg, &mut streamed)?;
    assert_eq!(in_memory, streamed);

    let text = String::from_utf8(in_memory)?;
    print!("{text}");
    Ok(text)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("raw_volume");
}
