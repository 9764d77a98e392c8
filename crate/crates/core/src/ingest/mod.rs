//! Bit-exact file readers, for whole-field loading and low-memory access.

pub mod bmp;
pub mod raw;

pub use bmp::{open_bmp_lowmem, read_bmp, write_bmp, BmpLayout, BmpReader, BmpSource, ReadStats};
pub use raw::{
    open_raw_lowmem, read_raw_volume, write_raw_volume, Element, RawReader, RawSource, VolumeDims,
    VolumeSpec,
};
