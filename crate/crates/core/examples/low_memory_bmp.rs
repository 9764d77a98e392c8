// Gathering straight from a BMP file without loading it.
use ecurve::ingest::{open_bmp_lowmem, read_bmp, write_bmp};
use ecurve::{gather_2d_parallel, random_field_2d, Distribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("noise.bmp");
    write_bmp(
        &path,
        &random_field_2d(321, 200, Distribution::Normal, 3, 255)?,
    )?;

    let loaded = gather_2d_parallel(&read_bmp(&path)?, 2)?;
    let source = open_bmp_lowmem(&path)?;
    let streamed = gather_2d_parallel(&source, 2)?;
    assert_eq!(streamed, loaded);

    let file_len = std::fs::metadata(&path)?.len();
    println!("file: {file_len} bytes");
    println!(
        "peak field buffer: {} bytes",
        source.stats().peak_buffer_bytes()
    );
    println!("bytes read: {}", source.stats().bytes_read());
    assert!(source.stats().peak_buffer_bytes() < 64);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("low_memory_bmp");
}
