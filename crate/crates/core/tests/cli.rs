use std::path::Path;
use std::process::{Command, Output};

use ecurve::ingest::{write_bmp, write_raw_volume, Element};
use ecurve::{random_field_2d, random_field_3d, Distribution, Field2D};

fn ecurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecurve"))
        .args(args)
        .output()
        .expect("spawn ecurve")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_black_pixel_has_ec_one_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("px.bmp");
    write_bmp(&path, &Field2D::new(1, 1, vec![0], 255).unwrap()).unwrap();
    let csv = stdout(&ecurve(&[
        "curve",
        "--input",
        s(&path),
        "--connectivity",
        "8",
    ]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,ec_8c");
    assert_eq!(lines.len(), 257);
    assert!(lines[1..]
        .iter()
        .enumerate()
        .all(|(c, l)| *l == format!("{c},1")));
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.bmp");
    write_bmp(
        &path,
        &random_field_2d(97, 61, Distribution::Normal, 4, 255).unwrap(),
    )
    .unwrap();
    let run = |workers: &str, extra: &[&str]| {
        let mut args = vec![
            "curve",
            "--input",
            s(&path),
            "--descriptor",
            "ec",
            "--descriptor",
            "perimeter",
            "--descriptor",
            "area",
            "--workers",
            workers,
        ];
        args.extend_from_slice(extra);
        stdout(&ecurve(&args))
    };
    let serial = run("1", &[]);
    assert_eq!(run("8", &[]), serial);
    assert_eq!(run("3", &["--low-memory"]), serial);
}

#[test]
fn hole_emerges_in_a_hand_made_image() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.bmp");
    // level-1 ring around a level-3 center on a level-2 background
    let field = Field2D::from_fn(5, 5, 255, |i, j| match (i, j) {
        (2, 2) => 3,
        (1..=3, 1..=3) => 1,
        _ => 2,
    })
    .unwrap();
    write_bmp(&path, &field).unwrap();
    let csv = stdout(&ecurve(&[
        "curve",
        "--input",
        s(&path),
        "--output-format",
        "csv",
    ]));
    let ec: Vec<&str> = csv
        .lines()
        .skip(1)
        .take(5)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(ec, ["0", "0", "0", "1", "1"]);
}

#[test]
fn raw_volume_with_flags_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.raw");
    let out = dir.path().join("curve.json");
    write_raw_volume(
        &path,
        &random_field_3d(6, 5, 4, Distribution::Uniform, 2, 255).unwrap(),
        Element::U8,
    )
    .unwrap();
    let o = ecurve(&[
        "curve",
        "--input",
        s(&path),
        "--format",
        "raw",
        "--dims",
        "6x5x4",
        "--element",
        "u8",
        "--descriptor",
        "volume",
        "--output-format",
        "json",
        "--output",
        s(&out),
    ]);
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["dims"], serde_json::json!([6, 5, 4]));
    assert_eq!(v["curves"][0]["values"][255], 120.0);
}

#[test]
fn dump_of_single_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.bmp");
    write_bmp(&path, &Field2D::new(1, 1, vec![9], 255).unwrap()).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&ecurve(&["dump", "--input", s(&path)]))).unwrap();
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["max_level"], 255);
    let q1 = &v["contributions"][0];
    assert_eq!(q1["type"], "q1");
    assert_eq!(q1["births"][9], 4);
    assert_eq!(
        q1["births"]
            .as_array()
            .unwrap()
            .iter()
            .filter_map(|x| x.as_u64())
            .sum::<u64>(),
        4
    );
    // an all-M field has nothing below M
    write_bmp(&path, &Field2D::new(3, 2, vec![255; 6], 255).unwrap()).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&ecurve(&["dump", "--input", s(&path)]))).unwrap();
    for t in v["contributions"].as_array().unwrap() {
        assert!(
            t["births"].as_array().unwrap()[..255]
                .iter()
                .all(|x| x == 0),
            "{}",
            t["type"]
        );
    }
}

#[test]
fn bench_reports_each_worker_count() {
    let o = ecurve(&[
        "bench",
        "--generate",
        "128x96",
        "--dist",
        "normal",
        "--seed",
        "3",
        "--repeats",
        "2",
        "--sweep-workers",
        "1,2",
        "--include-io",
    ]);
    let text = stdout(&o);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(
        rows[0].starts_with("1,") && rows[0].contains(",MP/s,1.00,"),
        "{text}"
    );
    let v = stdout(&ecurve(&["bench", "--generate", "8x8x8", "--repeats", "1"]));
    assert!(v.contains("MV/s"), "{v}");
}

#[test]
fn user_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.bmp");
    assert_eq!(
        ecurve(&["curve", "--input", s(&missing)]).status.code(),
        Some(1)
    );
    assert_eq!(
        ecurve(&["curve", "--generate", "4x4", "--connectivity", "26"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ecurve(&["curve", "--generate", "4x4", "--workers", "0"])
            .status
            .code(),
        Some(1)
    );
    let bad = dir.path().join("bad.raw");
    std::fs::write(&bad, [0u8; 5]).unwrap();
    let o = ecurve(&["curve", "--input", s(&bad), "--dims", "2x2x2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 8 bytes, found 5"));
    assert_eq!(ecurve(&["--help"]).status.code(), Some(0));
}
