//! Headerless little-endian volumes.
//!
//! Samples are stored in (i, j, k) order with k fastest: the byte offset of
//! sample (i, j, k) is `((i * w + j) * d + k) * element_size`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field3D, Quantizer, MAX_SUPPORTED_LEVEL};
use crate::ingest::bmp::ReadStats;
use crate::source::{Reader3D, Source3D, SourceMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    U8,
    U16,
}

impl Element {
    pub fn size(self) -> usize {
        match self {
            Element::U8 => 1,
            Element::U16 => 2,
        }
    }

    fn decode(self, bytes: &[u8]) -> u16 {
        match self {
            Element::U8 => u16::from(bytes[0]),
            Element::U16 => u16::from_le_bytes([bytes[0], bytes[1]]),
        }
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u8" => Ok(Element::U8),
            "u16" | "u16le" => Ok(Element::U16),
            _ => Err(Error::Config(format!(
                "unknown element type '{s}' (expected u8 or u16)"
            ))),
        }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Element::U8 => "u8",
            Element::U16 => "u16",
        })
    }
}

/// Volume dimensions: `w` and `h` span the (j, i) plane, `d` is the fastest axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeDims {
    pub w: usize,
    pub h: usize,
    pub d: usize,
}

impl VolumeDims {
    pub fn new(w: usize, h: usize, d: usize) -> Self {
        VolumeDims { w, h, d }
    }

    pub fn cells(&self) -> usize {
        self.w * self.h * self.d
    }

    fn check(&self) -> Result<()> {
        if self.w == 0 || self.h == 0 || self.d == 0 {
            return Err(Error::ZeroDimension(vec![self.w, self.h, self.d]));
        }
        Ok(())
    }
}

impl FromStr for VolumeDims {
    type Err = Error;

    /// Parses `WxHxD`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
        let bad = || Error::Config(format!("expected dimensions WxHxD, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(VolumeDims::new(n[0], n[1], n[2]))
    }
}

/// Sidecar JSON describing a raw volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSpec {
    pub w: usize,
    pub h: usize,
    pub d: usize,
    pub element: Element,
    pub max_level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
}

impl VolumeSpec {
    pub fn dims(&self) -> VolumeDims {
        VolumeDims::new(self.w, self.h, self.d)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone, Copy)]
enum Mapping {
    Identity,
    Linear(Quantizer),
}

impl Mapping {
    #[inline]
    fn apply(&self, v: u16) -> u16 {
        match self {
            Mapping::Identity => v,
            Mapping::Linear(q) => q.level(f64::from(v)),
        }
    }
}

fn check_max_level(max_level: u32) -> Result<()> {
    if max_level == 0 || max_level > MAX_SUPPORTED_LEVEL {
        return Err(Error::MaxLevelOutOfRange(max_level));
    }
    Ok(())
}

fn check_size(path: &Path, dims: VolumeDims, element: Element, actual: u64) -> Result<()> {
    let expected = (dims.cells() * element.size()) as u64;
    if actual != expected {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            expected,
            actual,
        });
    }
    Ok(())
}

/// Loads a raw volume.
///
/// u8 data with `max_level == 255` and no range are taken as-is. Otherwise
/// samples are quantized linearly, over `range` if given or else over the
/// data's own min and max.
pub fn read_raw_volume(
    path: impl AsRef<Path>,
    dims: VolumeDims,
    element: Element,
    max_level: u32,
    range: Option<(f64, f64)>,
) -> Result<Field3D> {
    let path = path.as_ref();
    dims.check()?;
    check_max_level(max_level)?;
    let bytes = std::fs::read(path)?;
    check_size(path, dims, element, bytes.len() as u64)?;
    let raw: Vec<u16> = bytes
        .chunks_exact(element.size())
        .map(|b| element.decode(b))
        .collect();
    let mapping = match (element, max_level, range) {
        (Element::U8, 255, None) => Mapping::Identity,
        (_, _, Some((lo, hi))) => Mapping::Linear(Quantizer::new(lo, hi, max_level)?),
        (_, _, None) => Mapping::Linear(Quantizer::fit(&raw, max_level)?),
    };
    let values = raw.into_iter().map(|v| mapping.apply(v)).collect();
    Field3D::new(dims.w, dims.h, dims.d, values, max_level)
}

/// Writes a field as raw samples in (i, j, k) order.
pub fn write_raw_volume(path: impl AsRef<Path>, field: &Field3D, element: Element) -> Result<()> {
    if element == Element::U8 && field.max_level() > 255 {
        return Err(Error::Config(format!(
            "u8 volume cannot hold max level {}",
            field.max_level()
        )));
    }
    let mut out = BufWriter::new(File::create(path)?);
    for &v in field.values() {
        match element {
            Element::U8 => out.write_all(&[v as u8])?,
            Element::U16 => out.write_all(&v.to_le_bytes())?,
        }
    }
    out.flush()?;
    Ok(())
}

/// A raw volume read on demand.
#[derive(Debug)]
pub struct RawSource {
    path: PathBuf,
    dims: VolumeDims,
    element: Element,
    max_level: u32,
    mapping: Mapping,
    stats: Arc<ReadStats>,
}

/// Opens a raw volume for low-memory gathering.
///
/// Quantization must be pointwise here, so anything other than u8 data at
/// `max_level == 255` needs an explicit `range`.
pub fn open_raw_lowmem(
    path: impl AsRef<Path>,
    dims: VolumeDims,
    element: Element,
    max_level: u32,
    range: Option<(f64, f64)>,
) -> Result<RawSource> {
    let path = path.as_ref().to_path_buf();
    dims.check()?;
    check_max_level(max_level)?;
    let len = std::fs::metadata(&path)?.len();
    check_size(&path, dims, element, len)?;
    let mapping = match (element, max_level, range) {
        (Element::U8, 255, None) => Mapping::Identity,
        (_, _, Some((lo, hi))) => Mapping::Linear(Quantizer::new(lo, hi, max_level)?),
        (_, _, None) => {
            return Err(Error::Config(format!(
                "low-memory mode for {element} data at max level {max_level} needs an explicit value range"
            )))
        }
    };
    Ok(RawSource {
        path,
        dims,
        element,
        max_level,
        mapping,
        stats: Arc::new(ReadStats::default()),
    })
}

impl RawSource {
    pub fn dims(&self) -> VolumeDims {
        self.dims
    }

    pub fn stats(&self) -> &ReadStats {
        &self.stats
    }
}

#[derive(Debug)]
pub struct RawReader {
    file: File,
    dims: VolumeDims,
    element: Element,
    mapping: Mapping,
    buf: [u8; 4],
    stats: Arc<ReadStats>,
    bytes_read: u64,
}

impl Source3D for RawSource {
    type Reader<'a> = RawReader;

    fn width(&self) -> usize {
        self.dims.w
    }

    fn height(&self) -> usize {
        self.dims.h
    }

    fn depth(&self) -> usize {
        self.dims.d
    }

    fn max_level(&self) -> u32 {
        self.max_level
    }

    fn mode(&self) -> SourceMode {
        SourceMode::FileBacked
    }

    fn reader(&self) -> Result<RawReader> {
        let buf = [0u8; 4];
        self.stats.note_buffer(std::mem::size_of_val(&buf));
        Ok(RawReader {
            file: File::open(&self.path)?,
            dims: self.dims,
            element: self.element,
            mapping: self.mapping,
            buf,
            stats: Arc::clone(&self.stats),
            bytes_read: 0,
        })
    }
}

impl Reader3D for RawReader {
    fn read_run(&mut self, i: usize, j: usize, k: usize, out: &mut [u32]) -> Result<()> {
        let es = self.element.size();
        let per_read = self.buf.len() / es;
        for (n, chunk) in out.chunks_mut(per_read).enumerate() {
            let index = (i * self.dims.w + j) * self.dims.d + k + n * per_read;
            let bytes = &mut self.buf[..chunk.len() * es];
            self.file.read_exact_at(bytes, (index * es) as u64)?;
            self.bytes_read += bytes.len() as u64;
            for (o, b) in chunk.iter_mut().zip(bytes.chunks_exact(es)) {
                *o = u32::from(self.mapping.apply(self.element.decode(b)));
            }
        }
        Ok(())
    }
}

impl Drop for RawReader {
    fn drop(&mut self) {
        self.stats.add_read(self.bytes_read);
    }
}
