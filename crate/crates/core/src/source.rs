//! Sample access shared by the gather kernels.
//!
//! A source hands out one reader per worker. In-memory fields lend
//! themselves as readers; file-backed sources open an independent handle
//! per reader and fetch each run of samples from disk on demand.

use crate::error::Result;
use crate::field::{Field2D, Field3D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    InMemory,
    FileBacked,
}

/// A 2D field that can be sampled by any number of concurrent readers.
pub trait Source2D: Sync {
    type Reader<'a>: Reader2D
    where
        Self: 'a;

    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn max_level(&self) -> u32;
    fn mode(&self) -> SourceMode;
    fn reader(&self) -> Result<Self::Reader<'_>>;
}

pub trait Reader2D {
    /// Reads `out.len()` consecutive samples of row `i`, starting at column `j`.
    /// Indices must be in range; the kernels never ask for absent cells.
    fn read_run(&mut self, i: usize, j: usize, out: &mut [u32]) -> Result<()>;

    fn sample_at(&mut self, i: usize, j: usize) -> Result<u32> {
        let mut v = [0];
        self.read_run(i, j, &mut v)?;
        Ok(v[0])
    }
}

/// A 3D field that can be sampled by any number of concurrent readers.
pub trait Source3D: Sync {
    type Reader<'a>: Reader3D
    where
        Self: 'a;

    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn depth(&self) -> usize;
    fn max_level(&self) -> u32;
    fn mode(&self) -> SourceMode;
    fn reader(&self) -> Result<Self::Reader<'_>>;
}

pub trait Reader3D {
    /// Reads `out.len()` consecutive samples along depth, starting at `(i, j, k)`.
    fn read_run(&mut self, i: usize, j: usize, k: usize, out: &mut [u32]) -> Result<()>;

    fn sample_at(&mut self, i: usize, j: usize, k: usize) -> Result<u32> {
        let mut v = [0];
        self.read_run(i, j, k, &mut v)?;
        Ok(v[0])
    }
}

impl Source2D for Field2D {
    type Reader<'a> = &'a Field2D;

    fn width(&self) -> usize {
        Field2D::width(self)
    }

    fn height(&self) -> usize {
        Field2D::height(self)
    }

    fn max_level(&self) -> u32 {
        Field2D::max_level(self)
    }

    fn mode(&self) -> SourceMode {
        SourceMode::InMemory
    }

    fn reader(&self) -> Result<&Field2D> {
        Ok(self)
    }
}

impl Reader2D for &Field2D {
    #[inline]
    fn read_run(&mut self, i: usize, j: usize, out: &mut [u32]) -> Result<()> {
        let start = i * self.width() + j;
        let src = &self.values()[start..start + out.len()];
        for (o, &v) in out.iter_mut().zip(src) {
            *o = u32::from(v);
        }
        Ok(())
    }
}

impl Source3D for Field3D {
    type Reader<'a> = &'a Field3D;

    fn width(&self) -> usize {
        Field3D::width(self)
    }

    fn height(&self) -> usize {
        Field3D::height(self)
    }

    fn depth(&self) -> usize {
        Field3D::depth(self)
    }

    fn max_level(&self) -> u32 {
        Field3D::max_level(self)
    }

    fn mode(&self) -> SourceMode {
        SourceMode::InMemory
    }

    fn reader(&self) -> Result<&Field3D> {
        Ok(self)
    }
}

impl Reader3D for &Field3D {
    #[inline]
    fn read_run(&mut self, i: usize, j: usize, k: usize, out: &mut [u32]) -> Result<()> {
        let start = self.index(i, j, k);
        let src = &self.values()[start..start + out.len()];
        for (o, &v) in out.iter_mut().zip(src) {
            *o = u32::from(v);
        }
        Ok(())
    }
}
