use ecurve::ingest::{
    open_bmp_lowmem, open_raw_lowmem, read_bmp, read_raw_volume, write_bmp, write_raw_volume,
    Element, VolumeDims,
};
use ecurve::{
    gather_2d_parallel, gather_3d_parallel, random_field_2d, random_field_3d, Distribution,
    Field3D, Reader2D, Reader3D, Source2D, Source3D,
};
use proptest::prelude::*;

#[test]
fn file_backed_3d_gather_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.raw");
    let dims = VolumeDims::new(17, 9, 11);
    // wide samples, then quantized with a fixed range in both modes
    let wide = Field3D::from_fn(17, 9, 11, 65535, |i, j, k| {
        ((i * 7919 + j * 104_729 + k * 1299) % 60000) as u16
    })
    .unwrap();
    write_raw_volume(&path, &wide, Element::U16).unwrap();
    let range = Some((0.0, 60000.0));
    let loaded = read_raw_volume(&path, dims, Element::U16, 40, range).unwrap();
    let source = open_raw_lowmem(&path, dims, Element::U16, 40, range).unwrap();
    assert_eq!(
        gather_3d_parallel(&source, 3).unwrap(),
        gather_3d_parallel(&loaded, 1).unwrap()
    );
    assert_eq!(source.stats().peak_buffer_bytes(), 4);
}

#[test]
fn file_backed_2d_gather_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.bmp");
    write_bmp(
        &path,
        &random_field_2d(190, 108, Distribution::Uniform, 6, 255).unwrap(),
    )
    .unwrap();
    let source = open_bmp_lowmem(&path).unwrap();
    let map = gather_2d_parallel(&source, 4).unwrap();
    assert_eq!(
        map,
        gather_2d_parallel(&read_bmp(&path).unwrap(), 1).unwrap()
    );
    // one read of at most two samples per neighborhood row
    let vertices = 191 * 109;
    assert!(source.stats().bytes_read() <= 4 * vertices as u64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bmp_samples_match(w in 1usize..40, h in 1usize..20, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bmp");
        let f = random_field_2d(w, h, Distribution::Uniform, seed, 255).unwrap();
        write_bmp(&path, &f).unwrap();
        let src = open_bmp_lowmem(&path).unwrap();
        prop_assert_eq!((src.width(), src.height()), (w, h));
        let mut r = src.reader().unwrap();
        for i in 0..h {
            for j in 0..w {
                prop_assert_eq!(r.sample_at(i, j).unwrap(), u32::from(f.get(i, j)));
            }
        }
    }

    #[test]
    fn raw_samples_match(w in 1usize..8, h in 1usize..8, d in 1usize..8, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.raw");
        let f = random_field_3d(w, h, d, Distribution::Normal, seed, 255).unwrap();
        write_raw_volume(&path, &f, Element::U16).unwrap();
        let dims = VolumeDims::new(w, h, d);
        let src = open_raw_lowmem(&path, dims, Element::U16, 255, Some((0.0, 255.0))).unwrap();
        prop_assert_eq!(src.depth(), d);
        let mut r = src.reader().unwrap();
        for i in 0..h {
            for j in 0..w {
                for k in 0..d {
                    prop_assert_eq!(r.sample_at(i, j, k).unwrap(), u32::from(f.get(i, j, k)));
                }
            }
        }
    }
}
