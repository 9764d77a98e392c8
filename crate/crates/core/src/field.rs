//! Dense 2D/3D fields of quantized intensity levels.
//!
//! Index order is fixed: a 2D field is row-major with `i` the row (height)
//! and `j` the column (width). A 3D field adds the depth index `k`, which
//! varies fastest: the flat index of `(i, j, k)` is `(i * width + j) * depth + k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest supported filtration level. Levels are stored as `u16`; the
/// sentinel `M + 1` is only ever materialized in `u32` neighborhoods.
pub const MAX_SUPPORTED_LEVEL: u32 = u16::MAX as u32;

/// A `width x height` field of integer levels in `0..=max_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field2D {
    width: usize,
    height: usize,
    max_level: u32,
    values: Vec<u16>,
}

impl Field2D {
    pub fn new(width: usize, height: usize, values: Vec<u16>, max_level: u32) -> Result<Self> {
        check_dims(&[width, height])?;
        check_values(&values, width * height, max_level)?;
        Ok(Field2D {
            width,
            height,
            max_level,
            values,
        })
    }

    /// Builds a field by evaluating `f(i, j)` for every cell.
    pub fn from_fn(
        width: usize,
        height: usize,
        max_level: u32,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                values.push(f(i, j));
            }
        }
        Field2D::new(width, height, values, max_level)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Level of the face at row `i`, column `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.values[i * self.width + j]
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u16> {
        self.values
    }
}

/// A `width x height x depth` field of integer levels in `0..=max_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field3D {
    width: usize,
    height: usize,
    depth: usize,
    max_level: u32,
    values: Vec<u16>,
}

impl Field3D {
    pub fn new(
        width: usize,
        height: usize,
        depth: usize,
        values: Vec<u16>,
        max_level: u32,
    ) -> Result<Self> {
        check_dims(&[width, height, depth])?;
        check_values(&values, width * height * depth, max_level)?;
        Ok(Field3D {
            width,
            height,
            depth,
            max_level,
            values,
        })
    }

    /// Builds a field by evaluating `f(i, j, k)` for every cell, `k` fastest.
    pub fn from_fn(
        width: usize,
        height: usize,
        depth: usize,
        max_level: u32,
        mut f: impl FnMut(usize, usize, usize) -> u16,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height * depth);
        for i in 0..height {
            for j in 0..width {
                for k in 0..depth {
                    values.push(f(i, j, k));
                }
            }
        }
        Field3D::new(width, height, depth, values, max_level)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.width + j) * self.depth + k
    }

    /// Level of the cell at (row `i`, column `j`, depth `k`).
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u16 {
        self.values[self.index(i, j, k)]
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u16> {
        self.values
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::ZeroDimension(dims.to_vec()));
    }
    Ok(())
}

fn check_values(values: &[u16], expected: usize, max_level: u32) -> Result<()> {
    if max_level > MAX_SUPPORTED_LEVEL {
        return Err(Error::MaxLevelOutOfRange(max_level));
    }
    if values.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: values.len(),
        });
    }
    if let Some((index, &value)) = values
        .iter()
        .enumerate()
        .find(|(_, &v)| u32::from(v) > max_level)
    {
        return Err(Error::LevelOutOfRange {
            index,
            value: u32::from(value),
            max_level,
        });
    }
    Ok(())
}

/// Linear map from a value range `[lo, hi]` onto levels `0..=max_level`.
///
/// `level = round((v - lo) * M / (hi - lo))`, rounding half away from zero,
/// clamped to `[0, M]`. A degenerate range maps everything to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    lo: f64,
    hi: f64,
    max_level: u32,
}

impl Quantizer {
    pub fn new(lo: f64, hi: f64, max_level: u32) -> Result<Self> {
        if max_level == 0 || max_level > MAX_SUPPORTED_LEVEL {
            return Err(Error::MaxLevelOutOfRange(max_level));
        }
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Config(format!("invalid value range [{lo}, {hi}]")));
        }
        Ok(Quantizer { lo, hi, max_level })
    }

    /// Builds a quantizer spanning the min and max of `raw`.
    pub fn fit<T: Copy + Into<f64>>(raw: &[T], max_level: u32) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyField);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (index, &v) in raw.iter().enumerate() {
            let v: f64 = v.into();
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite sample at index {index}")));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Quantizer::new(lo, hi, max_level)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    #[inline]
    pub fn level(&self, v: f64) -> u16 {
        if self.hi == self.lo {
            return 0;
        }
        let m = f64::from(self.max_level);
        let scaled = ((v - self.lo) * m / (self.hi - self.lo)).round();
        scaled.clamp(0.0, m) as u16
    }
}

/// Quantizes raw samples onto `0..=max_level` using their own min/max range.
pub fn quantize<T: Copy + Into<f64>>(raw: &[T], max_level: u32) -> Result<Vec<u16>> {
    let q = Quantizer::fit(raw, max_level)?;
    Ok(raw.iter().map(|&v| q.level(v.into())).collect())
}

/// Noise distribution for synthetic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Integer levels drawn equiprobably from `0..=M`.
    Uniform,
    /// Standard normal samples quantized onto `0..=M` by their min/max.
    Normal,
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "u" => Ok(Distribution::Uniform),
            "normal" | "n" => Ok(Distribution::Normal),
            other => Err(Error::Config(format!("unknown distribution '{other}'"))),
        }
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Normal => "normal",
        })
    }
}

fn random_levels(n: usize, dist: Distribution, seed: u64, max_level: u32) -> Result<Vec<u16>> {
    if max_level > MAX_SUPPORTED_LEVEL {
        return Err(Error::MaxLevelOutOfRange(max_level));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::Uniform => {
            let m = max_level as u16;
            Ok((0..n).map(|_| rng.random_range(0..=m)).collect())
        }
        Distribution::Normal => {
            let raw: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if max_level == 0 {
                return Ok(vec![0; n]);
            }
            quantize(&raw, max_level)
        }
    }
}

/// Seeded random 2D field; identical output for identical arguments.
pub fn random_field_2d(
    width: usize,
    height: usize,
    dist: Distribution,
    seed: u64,
    max_level: u32,
) -> Result<Field2D> {
    check_dims(&[width, height])?;
    let values = random_levels(width * height, dist, seed, max_level)?;
    Field2D::new(width, height, values, max_level)
}

/// Seeded random 3D field; identical output for identical arguments.
pub fn random_field_3d(
    width: usize,
    height: usize,
    depth: usize,
    dist: Distribution,
    seed: u64,
    max_level: u32,
) -> Result<Field3D> {
    check_dims(&[width, height, depth])?;
    let values = random_levels(width * height * depth, dist, seed, max_level)?;
    Field3D::new(width, height, depth, values, max_level)
}
