//! Descriptor curves from contribution maps.
//!
//! A descriptor is a weight per contribution type; its value at level `c` is
//! the weighted sum of the types' counts at `c`. All built-in weights are
//! multiples of 1/8, so curves are carried as integer eighths and are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contrib2d::TYPE_NAMES_2D;
use crate::contrib3d::TYPE_NAMES_3D;
use crate::error::{Error, Result};
use crate::histogram::{Contributions, Dimension};

/// Denominator of every weight and curve value.
pub const QUANTUM: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    C4,
    C8,
    C26,
}

impl Connectivity {
    pub fn label(self) -> &'static str {
        match self {
            Connectivity::C4 => "4C",
            Connectivity::C8 => "8C",
            Connectivity::C26 => "26C",
        }
    }

    pub fn default_for(dim: Dimension) -> Self {
        match dim {
            Dimension::Two => Connectivity::C8,
            Dimension::Three => Connectivity::C26,
        }
    }

    pub fn valid_for(self, dim: Dimension) -> bool {
        matches!(
            (self, dim),
            (Connectivity::C4 | Connectivity::C8, Dimension::Two)
                | (Connectivity::C26, Dimension::Three)
        )
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_end_matches(['c', 'C', '-']) {
            "4" => Ok(Connectivity::C4),
            "8" => Ok(Connectivity::C8),
            "26" => Ok(Connectivity::C26),
            _ => Err(Error::Config(format!("unknown connectivity '{s}'"))),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Ec,
    Perimeter,
    /// Face count in 2D; in 3D an alias of [`Descriptor::SurfaceArea`].
    Area,
    Volume,
    SurfaceArea,
}

impl Descriptor {
    pub fn name(self) -> &'static str {
        match self {
            Descriptor::Ec => "ec",
            Descriptor::Perimeter => "perimeter",
            Descriptor::Area => "area",
            Descriptor::Volume => "volume",
            Descriptor::SurfaceArea => "surface-area",
        }
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ec" | "euler" => Ok(Descriptor::Ec),
            "perimeter" => Ok(Descriptor::Perimeter),
            "area" => Ok(Descriptor::Area),
            "volume" => Ok(Descriptor::Volume),
            "surface-area" | "surface_area" | "surface" => Ok(Descriptor::SurfaceArea),
            other => Err(Error::Config(format!("unknown descriptor '{other}'"))),
        }
    }
}

// Eighths, in type order q1, q2, qd, q3, q4.
const EC_8C_2D: [i64; 5] = [2, 0, -4, -2, 0];
const EC_4C_2D: [i64; 5] = [2, 0, 4, -2, 0];
const PERIMETER_2D: [i64; 5] = [8, 8, 16, 8, 0];
const AREA_2D: [i64; 5] = [2, 4, 4, 6, 8];

// Eighths, in type order q10, q20..q22, q30..q32, q40..q45, q50..q52, q60..q62, q70, q80.
const EC_26C_3D: [i64; 21] = [
    1, 0, -2, -6, -1, -3, -1, 0, -2, -2, 0, 0, 4, -1, 1, 3, 0, 2, 2, 1, 0,
];
const PERIMETER_3D: [i64; 21] = [
    12, 8, 24, 24, 12, 20, 36, 0, 24, 16, 24, 16, 48, 12, 20, 36, 8, 24, 24, 12, 0,
];
// q41 is 12 (1.5): six of the twelve quarter-faces around a tripod vertex
// separate an active cell from an empty one.
const SURFACE_3D: [i64; 21] = [
    6, 8, 12, 12, 10, 14, 18, 8, 12, 12, 16, 16, 24, 10, 14, 18, 8, 12, 12, 6, 0,
];
const VOLUME_3D: [i64; 21] = [
    1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 4, 4, 4, 5, 5, 5, 6, 6, 6, 7, 8,
];

/// One descriptor under one connectivity: a weight in eighths per stored type,
/// plus an optional weight for the implicit empty type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    name: String,
    dimension: Dimension,
    connectivity: Connectivity,
    weights: Vec<i64>,
    empty_weight: i64,
}

impl WeightTable {
    pub fn new(
        name: impl Into<String>,
        dimension: Dimension,
        connectivity: Connectivity,
        weights: Vec<i64>,
        empty_weight: i64,
    ) -> Result<Self> {
        if !connectivity.valid_for(dimension) {
            return Err(Error::Config(format!(
                "connectivity {connectivity} is not defined for {}D fields",
                dimension.as_usize()
            )));
        }
        let expected = type_names(dimension).len();
        if weights.len() != expected {
            return Err(Error::Config(format!(
                "{}D weight table needs {expected} weights, got {}",
                dimension.as_usize(),
                weights.len()
            )));
        }
        Ok(WeightTable {
            name: name.into(),
            dimension,
            connectivity,
            weights,
            empty_weight,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    /// Weights in eighths, in the map's type order.
    pub fn weights_eighths(&self) -> &[i64] {
        &self.weights
    }

    pub fn empty_weight_eighths(&self) -> i64 {
        self.empty_weight
    }

    /// Weight of a named type (`"qd"`, `"q41"`, ...) as a decimal.
    pub fn weight(&self, type_name: &str) -> Option<f64> {
        type_names(self.dimension)
            .iter()
            .position(|&n| n == type_name)
            .map(|i| self.weights[i] as f64 / QUANTUM as f64)
    }

    /// Parses the JSON weight-table format:
    /// `{"dimension": 2|3, "connectivity": "4C"|"8C"|"26C", "weights": {"q1": 2, ...}}`
    /// with numerators over 8. Types that are not listed weigh 0; `q0`/`q00`
    /// weighs the empty type.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightTableFile = serde_json::from_str(text)?;
        let dimension = match file.dimension {
            2 => Dimension::Two,
            3 => Dimension::Three,
            d => return Err(Error::Config(format!("unsupported dimension {d}"))),
        };
        let connectivity: Connectivity = file.connectivity.parse()?;
        let names = type_names(dimension);
        let mut weights = vec![0; names.len()];
        let mut empty_weight = 0;
        for (key, value) in file.weights {
            let key = key.to_ascii_lowercase();
            if key == "q0" || key == "q00" {
                empty_weight = value;
                continue;
            }
            let idx = names
                .iter()
                .position(|&n| n == key)
                .ok_or_else(|| Error::Config(format!("unknown contribution type '{key}'")))?;
            weights[idx] = value;
        }
        let name = file.name.unwrap_or_else(|| "custom".to_string());
        WeightTable::new(name, dimension, connectivity, weights, empty_weight)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        WeightTable::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let names = type_names(self.dimension);
        let mut weights: BTreeMap<String, i64> = names
            .iter()
            .zip(&self.weights)
            .map(|(n, &w)| (n.to_string(), w))
            .collect();
        if self.empty_weight != 0 {
            let key = if self.dimension == Dimension::Two {
                "q0"
            } else {
                "q00"
            };
            weights.insert(key.to_string(), self.empty_weight);
        }
        let file = WeightTableFile {
            name: Some(self.name.clone()),
            dimension: self.dimension.as_usize() as u8,
            connectivity: self.connectivity.label().to_string(),
            weights,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct WeightTableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dimension: u8,
    connectivity: String,
    weights: BTreeMap<String, i64>,
}

fn type_names(dim: Dimension) -> &'static [&'static str] {
    match dim {
        Dimension::Two => &TYPE_NAMES_2D,
        Dimension::Three => &TYPE_NAMES_3D,
    }
}

/// Built-in weight table for a descriptor, connectivity and dimensionality.
pub fn builtin_weights(
    descriptor: Descriptor,
    connectivity: Connectivity,
    dimension: Dimension,
) -> Result<WeightTable> {
    use Descriptor::*;
    let unsupported = || {
        Error::Config(format!(
            "no built-in {} weights for {}D fields with {connectivity} connectivity",
            descriptor.name(),
            dimension.as_usize()
        ))
    };
    if !connectivity.valid_for(dimension) {
        return Err(unsupported());
    }
    let weights: &[i64] = match (dimension, descriptor, connectivity) {
        (Dimension::Two, Ec, Connectivity::C8) => &EC_8C_2D,
        (Dimension::Two, Ec, Connectivity::C4) => &EC_4C_2D,
        (Dimension::Two, Perimeter, _) => &PERIMETER_2D,
        (Dimension::Two, Area, _) => &AREA_2D,
        (Dimension::Three, Ec, _) => &EC_26C_3D,
        (Dimension::Three, Perimeter, _) => &PERIMETER_3D,
        (Dimension::Three, Area | SurfaceArea, _) => &SURFACE_3D,
        (Dimension::Three, Volume, _) => &VOLUME_3D,
        _ => return Err(unsupported()),
    };
    WeightTable::new(
        descriptor.name(),
        dimension,
        connectivity,
        weights.to_vec(),
        0,
    )
}

/// Per-type counts at each level `0..=M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCounts {
    /// `counts[type][level]`
    pub counts: Vec<Vec<i64>>,
}

impl TypeCounts {
    pub fn levels(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    fn total_at(&self, c: usize) -> i64 {
        self.counts.iter().map(|k| k[c]).sum()
    }
}

/// Running sums of births minus deaths; the sentinel slot is never read.
pub fn counts_at_levels<C: Contributions + ?Sized>(map: &C) -> TypeCounts {
    let hist = map.histograms();
    let levels = map.max_level() as usize + 1;
    let counts = (0..hist.kinds())
        .map(|kind| {
            let births = hist.births(kind);
            let deaths = hist.deaths(kind);
            let mut running = 0i64;
            (0..levels)
                .map(|c| {
                    running += births[c] as i64 - deaths[c] as i64;
                    running
                })
                .collect()
        })
        .collect();
    TypeCounts { counts }
}

/// Empty-type count at each level: all vertices minus every stored type.
pub fn back_calc_empty<C: Contributions + ?Sized>(map: &C) -> Vec<i64> {
    back_calc_from_counts(map.vertex_count(), &counts_at_levels(map))
}

fn back_calc_from_counts(vertices: u64, counts: &TypeCounts) -> Vec<i64> {
    (0..counts.levels())
        .map(|c| vertices as i64 - counts.total_at(c))
        .collect()
}

/// Descriptor values at each level `0..=M`, held as exact eighths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorCurve {
    name: String,
    connectivity: Connectivity,
    cell_dims: Vec<usize>,
    eighths: Vec<i64>,
}

impl DescriptorCurve {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn cell_dims(&self) -> &[usize] {
        &self.cell_dims
    }

    pub fn len(&self) -> usize {
        self.eighths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eighths.is_empty()
    }

    /// Values as numerators over [`QUANTUM`].
    pub fn eighths(&self) -> &[i64] {
        &self.eighths
    }

    pub fn value(&self, level: usize) -> f64 {
        self.eighths[level] as f64 / QUANTUM as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|c| self.value(c)).collect()
    }

    /// The value at `level` as a shortest exact decimal string.
    pub fn format_value(&self, level: usize) -> String {
        format_eighths(self.eighths[level])
    }
}

/// Formats `n / 8` exactly, e.g. `-3 -> "-0.375"`, `16 -> "2"`.
pub fn format_eighths(n: i64) -> String {
    let sign = if n < 0 { "-" } else { "" };
    let a = n.unsigned_abs();
    let (int, frac) = (a / 8, a % 8);
    if frac == 0 {
        format!("{sign}{int}")
    } else {
        let digits = format!("{:03}", frac * 125);
        format!("{sign}{int}.{}", digits.trim_end_matches('0'))
    }
}

/// Dots per-level type counts with a weight table.
pub fn descriptor_curve<C: Contributions + ?Sized>(
    map: &C,
    table: &WeightTable,
) -> Result<DescriptorCurve> {
    let counts = counts_at_levels(map);
    curve_from_counts(map, &counts, table)
}

/// Like [`descriptor_curve`] for several tables, sharing one count pass.
pub fn descriptor_curves<C: Contributions + ?Sized>(
    map: &C,
    tables: &[WeightTable],
) -> Result<Vec<DescriptorCurve>> {
    let counts = counts_at_levels(map);
    tables
        .iter()
        .map(|t| curve_from_counts(map, &counts, t))
        .collect()
}

fn curve_from_counts<C: Contributions + ?Sized>(
    map: &C,
    counts: &TypeCounts,
    table: &WeightTable,
) -> Result<DescriptorCurve> {
    if table.dimension != map.dimension() || table.weights.len() != counts.counts.len() {
        return Err(Error::WeightMismatch(format!(
            "table '{}' is for {}D fields, map is {}D",
            table.name,
            table.dimension.as_usize(),
            map.dimension().as_usize()
        )));
    }
    let mut eighths = vec![0i64; counts.levels()];
    for (w, kind) in table.weights.iter().zip(&counts.counts) {
        if *w == 0 {
            continue;
        }
        for (out, &n) in eighths.iter_mut().zip(kind) {
            *out += w * n;
        }
    }
    if table.empty_weight != 0 {
        let empty = back_calc_from_counts(map.vertex_count(), counts);
        for (out, n) in eighths.iter_mut().zip(empty) {
            *out += table.empty_weight * n;
        }
    }
    Ok(DescriptorCurve {
        name: table.name.clone(),
        connectivity: table.connectivity,
        cell_dims: map.cell_dims(),
        eighths,
    })
}
