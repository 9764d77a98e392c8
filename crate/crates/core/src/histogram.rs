//! Birth/death histograms over filtration levels, one pair per contribution type.

use crate::error::{Error, Result};

/// Flat `births`/`deaths` storage: `kinds` histograms of `max_level + 2`
/// slots each. Slot `max_level + 1` is the sentinel ("never activates").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histograms {
    kinds: usize,
    stride: usize,
    births: Vec<u64>,
    deaths: Vec<u64>,
}

impl Histograms {
    pub fn new(kinds: usize, max_level: u32) -> Self {
        let stride = max_level as usize + 2;
        Histograms {
            kinds,
            stride,
            births: vec![0; kinds * stride],
            deaths: vec![0; kinds * stride],
        }
    }

    pub fn kinds(&self) -> usize {
        self.kinds
    }

    /// Histogram length, `max_level + 2`.
    pub fn len(&self) -> usize {
        self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.kinds == 0
    }

    pub fn max_level(&self) -> u32 {
        (self.stride - 2) as u32
    }

    #[inline(always)]
    pub(crate) fn birth(&mut self, kind: usize, level: u32) {
        self.births[kind * self.stride + level as usize] += 1;
    }

    #[inline(always)]
    pub(crate) fn death(&mut self, kind: usize, level: u32) {
        self.deaths[kind * self.stride + level as usize] += 1;
    }

    pub fn births(&self, kind: usize) -> &[u64] {
        &self.births[kind * self.stride..(kind + 1) * self.stride]
    }

    pub fn deaths(&self, kind: usize) -> &[u64] {
        &self.deaths[kind * self.stride..(kind + 1) * self.stride]
    }

    pub(crate) fn births_mut(&mut self, kind: usize) -> &mut [u64] {
        &mut self.births[kind * self.stride..(kind + 1) * self.stride]
    }

    pub(crate) fn deaths_mut(&mut self, kind: usize) -> &mut [u64] {
        &mut self.deaths[kind * self.stride..(kind + 1) * self.stride]
    }

    pub fn total_births(&self) -> u64 {
        self.births.iter().sum()
    }

    pub fn total_deaths(&self) -> u64 {
        self.deaths.iter().sum()
    }

    /// Element-wise sum of another histogram set of the same shape.
    pub fn merge(&mut self, other: &Histograms) -> Result<()> {
        if self.kinds != other.kinds || self.stride != other.stride {
            return Err(Error::Config(format!(
                "cannot merge histograms of shape {}x{} into {}x{}",
                other.kinds, other.stride, self.kinds, self.stride
            )));
        }
        for (a, b) in self.births.iter_mut().zip(&other.births) {
            *a += b;
        }
        for (a, b) in self.deaths.iter_mut().zip(&other.deaths) {
            *a += b;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// Common read access to 2D and 3D contribution maps.
pub trait Contributions {
    fn dimension(&self) -> Dimension;
    fn max_level(&self) -> u32;
    /// Cell extents, `[width, height]` or `[width, height, depth]`.
    fn cell_dims(&self) -> Vec<usize>;
    /// Short names of the stored contribution types, in histogram order.
    fn type_names(&self) -> &'static [&'static str];
    fn histograms(&self) -> &Histograms;

    /// Number of lattice vertices, i.e. neighborhoods visited by a full gather.
    fn vertex_count(&self) -> u64 {
        self.cell_dims().iter().map(|&d| d as u64 + 1).product()
    }
}
