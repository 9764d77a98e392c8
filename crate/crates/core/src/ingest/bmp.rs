//! 8-bit uncompressed BMP files.
//!
//! The palette is ignored: each pixel's raw index byte is its intensity.
//! Row 0 of the field is the top row of the image, whichever way the file
//! stores its rows.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::source::{Reader2D, Source2D, SourceMode};

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;
const PALETTE_LEN: usize = 256 * 4;
const BI_RGB: u32 = 0;

/// Where the pixels of an 8-bit BMP live in the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BmpLayout {
    pub data_offset: u64,
    pub width: usize,
    pub height: usize,
    pub bits_per_pixel: u16,
    /// Bytes per stored row, padded to a multiple of 4.
    pub row_stride: usize,
    pub bottom_up: bool,
}

impl BmpLayout {
    /// Parses the file header and BITMAPINFOHEADER (the first 54 bytes).
    pub fn parse(header: &[u8]) -> Result<Self> {
        if header.len() < FILE_HEADER_LEN + INFO_HEADER_LEN {
            return Err(Error::UnsupportedBmp(format!(
                "header is {} bytes, need {}",
                header.len(),
                FILE_HEADER_LEN + INFO_HEADER_LEN
            )));
        }
        if &header[0..2] != b"BM" {
            return Err(Error::UnsupportedBmp("missing 'BM' signature".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes([header[o], header[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
        let i32_at = |o: usize| i32::from_le_bytes(header[o..o + 4].try_into().unwrap());

        let data_offset = u64::from(u32_at(10));
        let info_len = u32_at(14);
        if (info_len as usize) < INFO_HEADER_LEN {
            return Err(Error::UnsupportedBmp(format!(
                "info header of {info_len} bytes"
            )));
        }
        let width = i32_at(18);
        let height = i32_at(22);
        let planes = u16_at(26);
        let bits_per_pixel = u16_at(28);
        let compression = u32_at(30);

        if planes != 1 {
            return Err(Error::UnsupportedBmp(format!("{planes} color planes")));
        }
        if bits_per_pixel != 8 {
            return Err(Error::UnsupportedBmp(format!(
                "{bits_per_pixel} bits per pixel, only 8 is supported"
            )));
        }
        if compression != BI_RGB {
            return Err(Error::UnsupportedBmp(format!(
                "compression method {compression}"
            )));
        }
        if width <= 0 || height == 0 {
            return Err(Error::UnsupportedBmp(format!(
                "dimensions {width}x{height}"
            )));
        }
        let width = width as usize;
        Ok(BmpLayout {
            data_offset,
            width,
            height: height.unsigned_abs() as usize,
            bits_per_pixel,
            row_stride: width.div_ceil(4) * 4,
            bottom_up: height > 0,
        })
    }

    /// Byte offset of pixel (row `r` from the top, column `c`).
    #[inline]
    pub fn pixel_offset(&self, r: usize, c: usize) -> u64 {
        let stored_row = if self.bottom_up {
            self.height - 1 - r
        } else {
            r
        };
        self.data_offset + (stored_row * self.row_stride + c) as u64
    }

    /// File length needed to hold every stored row.
    pub fn required_len(&self) -> u64 {
        self.data_offset + (self.row_stride * self.height) as u64
    }

    fn check_len(&self, actual: u64) -> Result<()> {
        let expected = self.required_len();
        if actual < expected {
            return Err(Error::TruncatedBmp { expected, actual });
        }
        Ok(())
    }
}

fn read_layout(file: &mut File) -> Result<BmpLayout> {
    let mut header = [0u8; FILE_HEADER_LEN + INFO_HEADER_LEN];
    file.read_exact(&mut header).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => {
            Error::UnsupportedBmp("file shorter than its header".into())
        }
        _ => Error::Io(e),
    })?;
    let layout = BmpLayout::parse(&header)?;
    layout.check_len(file.metadata()?.len())?;
    Ok(layout)
}

/// Loads an 8-bit BMP as a field with max level 255.
pub fn read_bmp(path: impl AsRef<Path>) -> Result<Field2D> {
    let bytes = std::fs::read(path)?;
    let layout = BmpLayout::parse(&bytes)?;
    layout.check_len(bytes.len() as u64)?;
    let mut values = Vec::with_capacity(layout.width * layout.height);
    for r in 0..layout.height {
        let start = layout.pixel_offset(r, 0) as usize;
        values.extend(
            bytes[start..start + layout.width]
                .iter()
                .map(|&b| u16::from(b)),
        );
    }
    Field2D::new(layout.width, layout.height, values, 255)
}

/// Writes a field as an 8-bit bottom-up BMP with a grayscale palette.
pub fn write_bmp(path: impl AsRef<Path>, field: &Field2D) -> Result<()> {
    if field.max_level() > 255 {
        return Err(Error::Config(format!(
            "8-bit BMP cannot hold max level {}",
            field.max_level()
        )));
    }
    let (w, h) = (field.width(), field.height());
    let stride = w.div_ceil(4) * 4;
    let data_offset = FILE_HEADER_LEN + INFO_HEADER_LEN + PALETTE_LEN;
    let image_len = stride * h;
    let file_len = data_offset + image_len;
    let too_big = || Error::Config(format!("{w}x{h} is too large for a BMP file"));
    let file_len32 = u32::try_from(file_len).map_err(|_| too_big())?;
    let w32 = i32::try_from(w).map_err(|_| too_big())?;
    let h32 = i32::try_from(h).map_err(|_| too_big())?;

    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(b"BM")?;
    out.write_all(&file_len32.to_le_bytes())?;
    out.write_all(&[0; 4])?;
    out.write_all(&(data_offset as u32).to_le_bytes())?;

    out.write_all(&(INFO_HEADER_LEN as u32).to_le_bytes())?;
    out.write_all(&w32.to_le_bytes())?;
    out.write_all(&h32.to_le_bytes())?;
    out.write_all(&1u16.to_le_bytes())?;
    out.write_all(&8u16.to_le_bytes())?;
    out.write_all(&BI_RGB.to_le_bytes())?;
    out.write_all(&(image_len as u32).to_le_bytes())?;
    out.write_all(&2835i32.to_le_bytes())?;
    out.write_all(&2835i32.to_le_bytes())?;
    out.write_all(&256u32.to_le_bytes())?;
    out.write_all(&0u32.to_le_bytes())?;

    for g in 0..=255u8 {
        out.write_all(&[g, g, g, 0])?;
    }
    let mut row = vec![0u8; stride];
    for r in (0..h).rev() {
        for (c, px) in row[..w].iter_mut().enumerate() {
            *px = field.get(r, c) as u8;
        }
        out.write_all(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Usage counters shared by all readers of one file-backed source.
#[derive(Debug, Default)]
pub struct ReadStats {
    peak_buffer: AtomicUsize,
    bytes_read: AtomicU64,
}

impl ReadStats {
    /// Largest field-data buffer any reader has held, in bytes.
    pub fn peak_buffer_bytes(&self) -> usize {
        self.peak_buffer.load(Ordering::Relaxed)
    }

    /// Total bytes of field data fetched from disk.
    pub fn bytes_read(&self) -> u64 {
        self.bytes_read.load(Ordering::Relaxed)
    }

    pub(crate) fn note_buffer(&self, bytes: usize) {
        self.peak_buffer.fetch_max(bytes, Ordering::Relaxed);
    }

    pub(crate) fn add_read(&self, bytes: u64) {
        self.bytes_read.fetch_add(bytes, Ordering::Relaxed);
    }
}

/// A BMP read on demand, one neighborhood row at a time.
#[derive(Debug)]
pub struct BmpSource {
    path: PathBuf,
    layout: BmpLayout,
    stats: Arc<ReadStats>,
}

/// Opens a BMP for low-memory gathering. Only the header is read here.
pub fn open_bmp_lowmem(path: impl AsRef<Path>) -> Result<BmpSource> {
    let path = path.as_ref().to_path_buf();
    let layout = read_layout(&mut File::open(&path)?)?;
    Ok(BmpSource {
        path,
        layout,
        stats: Arc::new(ReadStats::default()),
    })
}

impl BmpSource {
    pub fn layout(&self) -> &BmpLayout {
        &self.layout
    }

    pub fn stats(&self) -> &ReadStats {
        &self.stats
    }
}

/// Each reader owns its own file handle.
#[derive(Debug)]
pub struct BmpReader {
    file: File,
    layout: BmpLayout,
    buf: [u8; 2],
    stats: Arc<ReadStats>,
    // flushed to the shared counter on drop
    bytes_read: u64,
}

impl Source2D for BmpSource {
    type Reader<'a> = BmpReader;

    fn width(&self) -> usize {
        self.layout.width
    }

    fn height(&self) -> usize {
        self.layout.height
    }

    fn max_level(&self) -> u32 {
        255
    }

    fn mode(&self) -> SourceMode {
        SourceMode::FileBacked
    }

    fn reader(&self) -> Result<BmpReader> {
        let buf = [0u8; 2];
        self.stats.note_buffer(std::mem::size_of_val(&buf));
        Ok(BmpReader {
            file: File::open(&self.path)?,
            layout: self.layout,
            buf,
            stats: Arc::clone(&self.stats),
            bytes_read: 0,
        })
    }
}

impl Reader2D for BmpReader {
    fn read_run(&mut self, i: usize, j: usize, out: &mut [u32]) -> Result<()> {
        for (n, chunk) in out.chunks_mut(self.buf.len()).enumerate() {
            let offset = self.layout.pixel_offset(i, j + n * self.buf.len());
            let bytes = &mut self.buf[..chunk.len()];
            self.file.read_exact_at(bytes, offset)?;
            self.bytes_read += bytes.len() as u64;
            for (o, &b) in chunk.iter_mut().zip(bytes.iter()) {
                *o = u32::from(b);
            }
        }
        Ok(())
    }
}

impl Drop for BmpReader {
    fn drop(&mut self) {
        self.stats.add_read(self.bytes_read);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_field_2d, Distribution};

    #[test]
    fn one_pixel_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.bmp");
        let f = Field2D::new(1, 1, vec![7], 255).unwrap();
        write_bmp(&path, &f).unwrap();
        assert_eq!(read_bmp(&path).unwrap(), f);
        // 1 pixel + 3 pad bytes after the 1078-byte header and palette
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 1078 + 4);
    }

    #[test]
    fn width_three_has_one_pad_byte() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("three.bmp");
        let f = Field2D::new(3, 2, vec![1, 2, 3, 4, 5, 6], 255).unwrap();
        write_bmp(&path, &f).unwrap();
        let src = open_bmp_lowmem(&path).unwrap();
        assert_eq!(src.layout().row_stride, 4);
        assert!(src.layout().bottom_up);
        // bottom-up: the top row is stored last
        assert_eq!(src.layout().pixel_offset(0, 0), 1078 + 4);
        assert_eq!(src.layout().pixel_offset(1, 2), 1078 + 2);
    }

    #[test]
    fn two_by_two_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("2x2.bmp");
        let f = Field2D::new(2, 2, vec![1, 2, 3, 4], 255).unwrap();
        write_bmp(&path, &f).unwrap();
        let back = read_bmp(&path).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.get(0, 1), 2);
        assert_eq!(back.get(1, 0), 3);
    }

    #[test]
    fn lowmem_samples_match_loaded_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.bmp");
        let f = random_field_2d(13, 7, Distribution::Uniform, 5, 255).unwrap();
        write_bmp(&path, &f).unwrap();
        let src = open_bmp_lowmem(&path).unwrap();
        let mut reader = src.reader().unwrap();
        for i in 0..7 {
            for j in 0..13 {
                assert_eq!(reader.sample_at(i, j).unwrap(), u32::from(f.get(i, j)));
            }
        }
        let mut run = [0u32; 5];
        reader.read_run(3, 4, &mut run).unwrap();
        assert_eq!(
            run.to_vec(),
            (4..9).map(|j| u32::from(f.get(3, j))).collect::<Vec<_>>()
        );
        drop(reader);
        assert_eq!(src.stats().bytes_read(), 13 * 7 + 5);
        assert_eq!(src.stats().peak_buffer_bytes(), 2);
    }

    #[test]
    fn top_down_files_are_supported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("td.bmp");
        let f = Field2D::new(2, 2, vec![10, 20, 30, 40], 255).unwrap();
        write_bmp(&path, &f).unwrap();
        // flip to top-down: negate height, reverse the two stored rows
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[22..26].copy_from_slice(&(-2i32).to_le_bytes());
        let (a, b) = (1078, 1082);
        let row0: Vec<u8> = bytes[a..a + 4].to_vec();
        let row1: Vec<u8> = bytes[b..b + 4].to_vec();
        bytes[a..a + 4].copy_from_slice(&row1);
        bytes[b..b + 4].copy_from_slice(&row0);
        std::fs::write(&path, &bytes).unwrap();
        assert_eq!(read_bmp(&path).unwrap(), f);
    }

    #[test]
    fn rejects_unsupported_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bmp");
        let f = Field2D::new(4, 4, vec![0; 16], 255).unwrap();
        write_bmp(&path, &f).unwrap();
        let good = std::fs::read(&path).unwrap();

        let mut bytes = good.clone();
        bytes[28] = 24;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_bmp(&path), Err(Error::UnsupportedBmp(_))));

        let mut bytes = good.clone();
        bytes[30] = 1;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_bmp(&path), Err(Error::UnsupportedBmp(_))));

        std::fs::write(&path, &good[..good.len() - 3]).unwrap();
        assert!(matches!(read_bmp(&path), Err(Error::TruncatedBmp { .. })));
        assert!(matches!(
            open_bmp_lowmem(&path),
            Err(Error::TruncatedBmp { .. })
        ));

        std::fs::write(&path, &good[..20]).unwrap();
        assert!(matches!(read_bmp(&path), Err(Error::UnsupportedBmp(_))));
        assert!(open_bmp_lowmem(&path).is_err());

        std::fs::write(
            &path,
            b"PNG not a bitmap at all, padded out to 54 bytes.........",
        )
        .unwrap();
        assert!(matches!(read_bmp(&path), Err(Error::UnsupportedBmp(_))));
    }

    #[test]
    fn writer_rejects_wide_levels() {
        let dir = tempfile::tempdir().unwrap();
        let f = Field2D::new(1, 1, vec![300], 1000).unwrap();
        assert!(write_bmp(dir.path().join("w.bmp"), &f).is_err());
    }
}
