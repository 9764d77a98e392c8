//! The `ecurve` command line: curves, benchmarks and contribution dumps.
//!
//! Every command writes to a caller-supplied sink so it can be driven from
//! tests and examples as well as from the binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::contrib2d::{gather_2d_parallel, ContributionMap2D, TYPE_NAMES_2D};
use crate::contrib3d::{gather_3d_parallel, ContributionMap3D, TYPE_NAMES_3D};
use crate::descriptors::{
    builtin_weights, descriptor_curves, Connectivity, Descriptor, DescriptorCurve, WeightTable,
};
use crate::error::{Error, Result};
use crate::field::{random_field_2d, random_field_3d, Distribution, Field2D, Field3D};
use crate::histogram::{Contributions, Dimension, Histograms};
use crate::ingest::{
    open_bmp_lowmem, open_raw_lowmem, read_bmp, read_raw_volume, BmpSource, Element, RawSource,
    VolumeDims, VolumeSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Bmp,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Extents of a synthetic field: `[w, h]` or `[w, h, d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateSpec(pub Vec<usize>);

impl FromStr for GenerateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected WxH or WxHxD, got '{s}'"));
        let dims: Vec<usize> = s
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if !(2..=3).contains(&dims.len()) {
            return Err(bad());
        }
        if dims.contains(&0) {
            return Err(Error::ZeroDimension(dims));
        }
        Ok(GenerateSpec(dims))
    }
}

/// A value range `lo,hi` for quantizing wide samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange(pub f64, pub f64);

impl FromStr for ValueRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected a range lo,hi, got '{s}'"));
        let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Ok(ValueRange(lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    File {
        path: PathBuf,
        format: Option<FileFormat>,
    },
    Generate {
        dims: Vec<usize>,
        dist: Distribution,
        seed: u64,
    },
}

/// Everything a command needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    /// Raw volume dimensions; taken from a sidecar JSON when absent.
    pub dims: Option<VolumeDims>,
    pub element: Option<Element>,
    pub max_level: Option<u32>,
    pub range: Option<(f64, f64)>,
    pub descriptors: Vec<Descriptor>,
    pub weight_files: Vec<PathBuf>,
    pub connectivity: Option<Connectivity>,
    pub workers: usize,
    pub low_memory: bool,
    pub output_format: OutputFormat,
    pub repeats: usize,
    pub sweep_workers: Vec<usize>,
    pub include_io: bool,
}

impl RunConfig {
    pub fn new(input: Input) -> Self {
        RunConfig {
            input,
            dims: None,
            element: None,
            max_level: None,
            range: None,
            descriptors: Vec::new(),
            weight_files: Vec::new(),
            connectivity: None,
            workers: 1,
            low_memory: false,
            output_format: OutputFormat::Csv,
            repeats: 5,
            sweep_workers: Vec::new(),
            include_io: false,
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        RunConfig::new(Input::File {
            path: path.into(),
            format: None,
        })
    }

    pub fn generate(dims: &[usize], dist: Distribution, seed: u64) -> Self {
        RunConfig::new(Input::Generate {
            dims: dims.to_vec(),
            dist,
            seed,
        })
    }

    pub fn dimension(&self) -> Result<Dimension> {
        match &self.input {
            Input::File { path, format } => Ok(match resolve_format(path, *format)? {
                FileFormat::Bmp => Dimension::Two,
                FileFormat::Raw => Dimension::Three,
            }),
            Input::Generate { dims, .. } => match dims.len() {
                2 => Ok(Dimension::Two),
                3 => Ok(Dimension::Three),
                n => Err(Error::Config(format!(
                    "cannot generate a {n}-dimensional field"
                ))),
            },
        }
    }

    pub fn connectivity_for(&self, dim: Dimension) -> Result<Connectivity> {
        let c = self.connectivity.unwrap_or(Connectivity::default_for(dim));
        if !c.valid_for(dim) {
            return Err(Error::Config(format!(
                "{c} connectivity does not apply to {}D fields",
                dim.as_usize()
            )));
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<Dimension> {
        if self.workers == 0 || self.sweep_workers.contains(&0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        let dim = self.dimension()?;
        self.connectivity_for(dim)?;
        Ok(dim)
    }
}

fn resolve_format(path: &Path, format: Option<FileFormat>) -> Result<FileFormat> {
    if let Some(f) = format {
        return Ok(f);
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("bmp") | Some("dib") => Ok(FileFormat::Bmp),
        Some("raw") | Some("vol") | Some("bin") => Ok(FileFormat::Raw),
        _ => Err(Error::Config(format!(
            "cannot infer the format of {}; pass --format bmp|raw",
            path.display()
        ))),
    }
}

struct RawParams {
    dims: VolumeDims,
    element: Element,
    max_level: u32,
    range: Option<(f64, f64)>,
}

fn sidecar_for(path: &Path) -> Option<PathBuf> {
    let mut appended = path.as_os_str().to_owned();
    appended.push(".json");
    [path.with_extension("json"), PathBuf::from(appended)]
        .into_iter()
        .find(|p| p.is_file())
}

fn raw_params(cfg: &RunConfig, path: &Path) -> Result<RawParams> {
    let spec = match cfg.dims {
        Some(_) => None,
        None => {
            let sidecar = sidecar_for(path).ok_or_else(|| {
                Error::Config(format!(
                    "{}: raw volumes need --dims or a sidecar JSON",
                    path.display()
                ))
            })?;
            Some(VolumeSpec::from_json_file(sidecar)?)
        }
    };
    Ok(RawParams {
        dims: cfg.dims.or(spec.as_ref().map(VolumeSpec::dims)).unwrap(),
        element: cfg
            .element
            .or(spec.as_ref().map(|s| s.element))
            .unwrap_or(Element::U8),
        max_level: cfg
            .max_level
            .or(spec.as_ref().map(|s| s.max_level))
            .unwrap_or(255),
        range: cfg.range.or(spec.as_ref().and_then(|s| s.range)),
    })
}

/// A field ready to gather from, either resident or file-backed.
pub enum Prepared {
    Field2D(Field2D),
    Field3D(Field3D),
    Bmp(BmpSource),
    Raw(RawSource),
}

impl Prepared {
    pub fn cell_dims(&self) -> Vec<usize> {
        use crate::source::{Source2D, Source3D};
        match self {
            Prepared::Field2D(f) => vec![f.width(), f.height()],
            Prepared::Field3D(f) => vec![f.width(), f.height(), f.depth()],
            Prepared::Bmp(s) => vec![s.width(), s.height()],
            Prepared::Raw(s) => vec![Source3D::width(s), Source3D::height(s), s.depth()],
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cell_dims().iter().product()
    }

    pub fn gather(&self, workers: usize) -> Result<ContributionMap> {
        Ok(match self {
            Prepared::Field2D(f) => ContributionMap::Two(gather_2d_parallel(f, workers)?),
            Prepared::Field3D(f) => ContributionMap::Three(gather_3d_parallel(f, workers)?),
            Prepared::Bmp(s) => ContributionMap::Two(gather_2d_parallel(s, workers)?),
            Prepared::Raw(s) => ContributionMap::Three(gather_3d_parallel(s, workers)?),
        })
    }
}

/// Loads or opens the configured input.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    match &cfg.input {
        Input::Generate { dims, dist, seed } => {
            if cfg.low_memory {
                return Err(Error::Config("--low-memory needs a file input".into()));
            }
            let m = cfg.max_level.unwrap_or(255);
            match dims[..] {
                [w, h] => Ok(Prepared::Field2D(random_field_2d(w, h, *dist, *seed, m)?)),
                [w, h, d] => Ok(Prepared::Field3D(random_field_3d(
                    w, h, d, *dist, *seed, m,
                )?)),
                _ => Err(Error::Config(format!(
                    "cannot generate a field of dims {dims:?}"
                ))),
            }
        }
        Input::File { path, format } => match resolve_format(path, *format)? {
            FileFormat::Bmp => {
                if let Some(m) = cfg.max_level.filter(|&m| m != 255) {
                    return Err(Error::Config(format!(
                        "8-bit BMP input always has max level 255, not {m}"
                    )));
                }
                if cfg.low_memory {
                    Ok(Prepared::Bmp(open_bmp_lowmem(path)?))
                } else {
                    Ok(Prepared::Field2D(read_bmp(path)?))
                }
            }
            FileFormat::Raw => {
                let p = raw_params(cfg, path)?;
                if cfg.low_memory {
                    Ok(Prepared::Raw(open_raw_lowmem(
                        path,
                        p.dims,
                        p.element,
                        p.max_level,
                        p.range,
                    )?))
                } else {
                    Ok(Prepared::Field3D(read_raw_volume(
                        path,
                        p.dims,
                        p.element,
                        p.max_level,
                        p.range,
                    )?))
                }
            }
        },
    }
}

/// A gathered contribution map of either dimensionality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContributionMap {
    Two(ContributionMap2D),
    Three(ContributionMap3D),
}

impl ContributionMap {
    pub fn as_contributions(&self) -> &dyn Contributions {
        match self {
            ContributionMap::Two(m) => m,
            ContributionMap::Three(m) => m,
        }
    }
}

/// Built-in tables for the requested descriptors, then any custom tables.
pub fn weight_tables(cfg: &RunConfig, dim: Dimension) -> Result<Vec<WeightTable>> {
    let connectivity = cfg.connectivity_for(dim)?;
    let mut descriptors = cfg.descriptors.clone();
    if descriptors.is_empty() && cfg.weight_files.is_empty() {
        descriptors.push(Descriptor::Ec);
    }
    let mut tables = descriptors
        .iter()
        .map(|&d| builtin_weights(d, connectivity, dim))
        .collect::<Result<Vec<_>>>()?;
    for path in &cfg.weight_files {
        tables.push(WeightTable::from_json_file(path)?);
    }
    Ok(tables)
}

/// Column header for a curve, e.g. `ec_8c` or `perimeter`.
pub fn column_name(curve: &DescriptorCurve) -> String {
    if curve.name() == Descriptor::Ec.name() {
        format!(
            "{}_{}",
            curve.name(),
            curve.connectivity().label().to_ascii_lowercase()
        )
    } else {
        curve.name().to_string()
    }
}

/// Gathers the configured input and assembles its curves.
pub fn compute_curves(cfg: &RunConfig) -> Result<(ContributionMap, Vec<DescriptorCurve>)> {
    let dim = cfg.validate()?;
    let tables = weight_tables(cfg, dim)?;
    let map = prepare(cfg)?.gather(cfg.workers)?;
    let curves = descriptor_curves(map.as_contributions(), &tables)?;
    Ok((map, curves))
}

#[derive(Serialize)]
struct CurveJson<'a> {
    name: String,
    descriptor: &'a str,
    connectivity: &'a str,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct CurvesJson<'a> {
    dimension: usize,
    dims: Vec<usize>,
    max_level: u32,
    levels: Vec<u32>,
    curves: Vec<CurveJson<'a>>,
}

/// Writes curves as CSV (`level,<columns>`) or JSON.
pub fn write_curves(
    out: &mut dyn Write,
    map: &dyn Contributions,
    curves: &[DescriptorCurve],
    format: OutputFormat,
) -> Result<()> {
    let m = map.max_level();
    match format {
        OutputFormat::Csv => {
            let mut header = String::from("level");
            for c in curves {
                header.push(',');
                header.push_str(&column_name(c));
            }
            writeln!(out, "{header}")?;
            for level in 0..=m as usize {
                let mut line = level.to_string();
                for c in curves {
                    line.push(',');
                    line.push_str(&c.format_value(level));
                }
                writeln!(out, "{line}")?;
            }
        }
        OutputFormat::Json => {
            let doc = CurvesJson {
                dimension: map.dimension().as_usize(),
                dims: map.cell_dims(),
                max_level: m,
                levels: (0..=m).collect(),
                curves: curves
                    .iter()
                    .map(|c| CurveJson {
                        name: column_name(c),
                        descriptor: c.name(),
                        connectivity: c.connectivity().label(),
                        values: c.values(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// `ecurve curve`
pub fn run_curve(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let (map, curves) = compute_curves(cfg)?;
    write_curves(out, map.as_contributions(), &curves, cfg.output_format)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeHistograms {
    #[serde(rename = "type")]
    pub kind: String,
    pub births: Vec<u64>,
    pub deaths: Vec<u64>,
}

/// Serialized contribution map. Histograms have `max_level + 2` entries;
/// the last one counts vertices whose type never activates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionDump {
    pub dimension: usize,
    pub dims: Vec<usize>,
    pub max_level: u32,
    pub contributions: Vec<TypeHistograms>,
}

impl ContributionDump {
    pub fn from_map(map: &dyn Contributions) -> Self {
        let hist = map.histograms();
        ContributionDump {
            dimension: map.dimension().as_usize(),
            dims: map.cell_dims(),
            max_level: map.max_level(),
            contributions: map
                .type_names()
                .iter()
                .enumerate()
                .map(|(kind, name)| TypeHistograms {
                    kind: name.to_string(),
                    births: hist.births(kind).to_vec(),
                    deaths: hist.deaths(kind).to_vec(),
                })
                .collect(),
        }
    }

    /// Rebuilds the contribution map, validating shape and type names.
    pub fn to_map(&self) -> Result<ContributionMap> {
        let names: &[&str] = match (self.dimension, self.dims.len()) {
            (2, 2) => &TYPE_NAMES_2D,
            (3, 3) => &TYPE_NAMES_3D,
            _ => {
                return Err(Error::Config(format!(
                    "dump has dimension {} with dims {:?}",
                    self.dimension, self.dims
                )))
            }
        };
        let mut hist = Histograms::new(names.len(), self.max_level);
        let mut seen = vec![false; names.len()];
        for entry in &self.contributions {
            let kind = names.iter().position(|n| *n == entry.kind).ok_or_else(|| {
                Error::Config(format!("unknown contribution type '{}'", entry.kind))
            })?;
            if std::mem::replace(&mut seen[kind], true) {
                return Err(Error::Config(format!(
                    "type '{}' appears twice",
                    entry.kind
                )));
            }
            if entry.births.len() != hist.len() || entry.deaths.len() != hist.len() {
                return Err(Error::Config(format!(
                    "type '{}': histograms must have {} entries",
                    entry.kind,
                    hist.len()
                )));
            }
            hist.births_mut(kind).copy_from_slice(&entry.births);
            hist.deaths_mut(kind).copy_from_slice(&entry.deaths);
        }
        Ok(match self.dims[..] {
            [w, h] => ContributionMap::Two(ContributionMap2D::from_histograms(w, h, hist)?),
            [w, h, d] => ContributionMap::Three(ContributionMap3D::from_histograms(w, h, d, hist)?),
            _ => unreachable!(),
        })
    }
}

/// Applies a weight table to a dump, independently of any gather.
pub fn reweight_dump(dump: &ContributionDump, table: &WeightTable) -> Result<DescriptorCurve> {
    let map = dump.to_map()?;
    crate::descriptors::descriptor_curve(map.as_contributions(), table)
}

/// `ecurve dump`
pub fn run_contrib_dump(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    cfg.validate()?;
    let map = prepare(cfg)?.gather(cfg.workers)?;
    serde_json::to_writer(
        &mut *out,
        &ContributionDump::from_map(map.as_contributions()),
    )?;
    writeln!(out)?;
    Ok(())
}

/// Sample mean and sample standard deviation (n - 1 denominator).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub workers: usize,
    /// Seconds per repeat for gather plus curve assembly.
    pub seconds: Vec<f64>,
    /// Seconds per repeat including input loading, with `--include-io`.
    pub seconds_with_io: Option<Vec<f64>>,
}

impl BenchRow {
    /// Millions of top cells per second, one per repeat.
    pub fn rates(&self, cells: usize) -> Vec<f64> {
        self.seconds
            .iter()
            .map(|s| cells as f64 / s / 1e6)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub description: String,
    pub cells: usize,
    pub dimension: Dimension,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn unit(&self) -> &'static str {
        match self.dimension {
            Dimension::Two => "MP/s",
            Dimension::Three => "MV/s",
        }
    }

    /// Mean serial time over mean time at `workers`, if a serial row exists.
    pub fn speedup(&self, workers: usize) -> Option<f64> {
        let mean = |w| {
            self.rows
                .iter()
                .find(|r| r.workers == w)
                .map(|r| mean_std(&r.seconds).0)
        };
        Some(mean(1)? / mean(workers)?)
    }

    pub fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.description)?;
        let io_col = self.rows.iter().any(|r| r.seconds_with_io.is_some());
        write!(out, "workers,mean_s,std_s,rate_mean,rate_std,unit,speedup")?;
        if io_col {
            write!(out, ",io_mean_s,io_std_s")?;
        }
        writeln!(out)?;
        for row in &self.rows {
            let (mean, std) = mean_std(&row.seconds);
            let (rate, rate_std) = mean_std(&row.rates(self.cells));
            let speedup = self
                .speedup(row.workers)
                .map_or_else(|| "-".to_string(), |s| format!("{s:.2}"));
            write!(
                out,
                "{},{mean:.6},{std:.6},{rate:.3},{rate_std:.3},{},{speedup}",
                row.workers,
                self.unit()
            )?;
            if let Some(io) = &row.seconds_with_io {
                let (m, s) = mean_std(io);
                write!(out, ",{m:.6},{s:.6}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Times gather plus curve assembly over `repeats` runs per worker count.
pub fn bench(cfg: &RunConfig) -> Result<BenchReport> {
    let dim = cfg.validate()?;
    if cfg.repeats == 0 {
        return Err(Error::Config("--repeats must be at least 1".into()));
    }
    let tables = weight_tables(cfg, dim)?;
    let prepared = prepare(cfg)?;
    let cells = prepared.cell_count();

    let mut worker_counts = if cfg.sweep_workers.is_empty() {
        vec![cfg.workers]
    } else {
        let mut w = cfg.sweep_workers.clone();
        if !w.contains(&1) {
            w.insert(0, 1);
        }
        w
    };
    worker_counts.dedup();

    let mut rows = Vec::with_capacity(worker_counts.len());
    for &workers in &worker_counts {
        let mut seconds = Vec::with_capacity(cfg.repeats);
        let mut with_io = cfg.include_io.then(Vec::new);
        for _ in 0..cfg.repeats {
            let t = Instant::now();
            let map = prepared.gather(workers)?;
            let curves = descriptor_curves(map.as_contributions(), &tables)?;
            seconds.push(t.elapsed().as_secs_f64());
            std::hint::black_box(curves);

            if let Some(io) = with_io.as_mut() {
                let t = Instant::now();
                let map = prepare(cfg)?.gather(workers)?;
                let curves = descriptor_curves(map.as_contributions(), &tables)?;
                io.push(t.elapsed().as_secs_f64());
                std::hint::black_box(curves);
            }
        }
        rows.push(BenchRow {
            workers,
            seconds,
            seconds_with_io: with_io,
        });
    }

    let source = match &cfg.input {
        Input::Generate { dist, seed, .. } => format!("generated {dist} (seed {seed})"),
        Input::File { path, .. } => path.display().to_string(),
    };
    let dims: Vec<String> = prepared.cell_dims().iter().map(usize::to_string).collect();
    let names: Vec<&str> = tables.iter().map(WeightTable::name).collect();
    Ok(BenchReport {
        description: format!(
            "# {} {}{}, {} repeats, timing gather + assembly of [{}]",
            dims.join("x"),
            source,
            if cfg.low_memory { ", low-memory" } else { "" },
            cfg.repeats,
            names.join(", ")
        ),
        cells,
        dimension: dim,
        rows,
    })
}

/// `ecurve bench`
pub fn run_bench(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    bench(cfg)?.write_text(out)?;
    Ok(())
}

#[derive(Debug, Parser)]
#[command(
    name = "ecurve",
    version,
    about = "Euler characteristic and related curves of images and volumes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute descriptor curves
    Curve(CommonArgs),
    /// Time gather and curve assembly
    Bench(CommonArgs),
    /// Write the vertex contribution map as JSON
    Dump(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input file (.bmp or raw volume)
    #[arg(
        long,
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    pub input: Option<PathBuf>,
    /// Generate a random field instead, WxH or WxHxD
    #[arg(long)]
    pub generate: Option<GenerateSpec>,
    #[arg(long, default_value = "uniform")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
    /// Raw volume dimensions WxHxD
    #[arg(long)]
    pub dims: Option<VolumeDims>,
    #[arg(long)]
    pub element: Option<Element>,
    #[arg(long)]
    pub max_level: Option<u32>,
    /// Value range lo,hi for quantizing raw samples
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<ValueRange>,
    /// ec, perimeter, area, volume, surface-area
    #[arg(long = "descriptor")]
    pub descriptors: Vec<Descriptor>,
    /// Custom weight table JSON
    #[arg(long = "weights")]
    pub weights: Vec<PathBuf>,
    /// 4 or 8 (2D), 26 (3D)
    #[arg(long)]
    pub connectivity: Option<Connectivity>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Read samples from the file on demand instead of loading it
    #[arg(long)]
    pub low_memory: bool,
    /// Output file; standard output if absent
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Worker counts to benchmark, e.g. 1,2,4,8
    #[arg(long, value_delimiter = ',')]
    pub sweep_workers: Vec<usize>,
    /// Also time input loading
    #[arg(long)]
    pub include_io: bool,
}

impl CommonArgs {
    pub fn to_config(&self) -> RunConfig {
        let input = match (&self.input, &self.generate) {
            (Some(path), _) => Input::File {
                path: path.clone(),
                format: self.format,
            },
            (None, Some(g)) => Input::Generate {
                dims: g.0.clone(),
                dist: self.dist,
                seed: self.seed,
            },
            (None, None) => unreachable!("clap requires --input or --generate"),
        };
        RunConfig {
            input,
            dims: self.dims,
            element: self.element,
            max_level: self.max_level,
            range: self.range.map(|r| (r.0, r.1)),
            descriptors: self.descriptors.clone(),
            weight_files: self.weights.clone(),
            connectivity: self.connectivity,
            workers: self.workers,
            low_memory: self.low_memory,
            output_format: self.output_format,
            repeats: self.repeats,
            sweep_workers: self.sweep_workers.clone(),
            include_io: self.include_io,
        }
    }
}

type CommandFn = fn(&RunConfig, &mut dyn Write) -> Result<()>;

fn dispatch(cli: &Cli) -> Result<()> {
    let (args, run): (&CommonArgs, CommandFn) = match &cli.command {
        Command::Curve(a) => (a, run_curve),
        Command::Bench(a) => (a, run_bench),
        Command::Dump(a) => (a, run_contrib_dump),
    };
    let cfg = args.to_config();
    match &args.output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            run(&cfg, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            run(&cfg, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ecurve: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_csv(cfg: &RunConfig) -> String {
        let mut out = Vec::new();
        run_curve(cfg, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn generate_spec_parses() {
        assert_eq!("4x3".parse::<GenerateSpec>().unwrap().0, vec![4, 3]);
        assert_eq!("4x3x2".parse::<GenerateSpec>().unwrap().0, vec![4, 3, 2]);
        assert!("4".parse::<GenerateSpec>().is_err());
        assert!("4x0".parse::<GenerateSpec>().is_err());
        assert!("1x2x3x4".parse::<GenerateSpec>().is_err());
    }

    #[test]
    fn range_parses() {
        assert_eq!(
            "-1.5,2".parse::<ValueRange>().unwrap(),
            ValueRange(-1.5, 2.0)
        );
        assert!("3".parse::<ValueRange>().is_err());
    }

    #[test]
    fn connectivity_checked_against_dimension() {
        let mut cfg = RunConfig::generate(&[4, 4], Distribution::Uniform, 1);
        cfg.connectivity = Some(Connectivity::C26);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.connectivity = Some(Connectivity::C4);
        assert_eq!(cfg.validate().unwrap(), Dimension::Two);
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn csv_has_header_and_one_row_per_level() {
        let mut cfg = RunConfig::generate(&[6, 5], Distribution::Uniform, 3);
        cfg.max_level = Some(4);
        cfg.descriptors = vec![Descriptor::Ec, Descriptor::Area];
        let csv = curve_csv(&cfg);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "level,ec_8c,area");
        assert_eq!(lines.len(), 1 + 5);
        assert_eq!(lines[5], "4,1,30");
    }

    #[test]
    fn workers_do_not_change_output() {
        let mut cfg = RunConfig::generate(&[40, 33], Distribution::Normal, 9);
        cfg.descriptors = vec![Descriptor::Ec, Descriptor::Perimeter];
        let serial = curve_csv(&cfg);
        cfg.workers = 8;
        assert_eq!(curve_csv(&cfg), serial);
    }

    #[test]
    fn json_mirrors_csv() {
        let mut cfg = RunConfig::generate(&[5, 5, 5], Distribution::Uniform, 2);
        cfg.max_level = Some(3);
        cfg.descriptors = vec![Descriptor::Ec, Descriptor::Volume];
        cfg.output_format = OutputFormat::Json;
        let mut out = Vec::new();
        run_curve(&cfg, &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["dimension"], 3);
        assert_eq!(v["levels"].as_array().unwrap().len(), 4);
        assert_eq!(v["curves"][0]["name"], "ec_26c");
        assert_eq!(v["curves"][1]["values"][3], 125.0);
    }

    #[test]
    fn dump_round_trips() {
        let cfg = RunConfig::generate(&[7, 4], Distribution::Uniform, 5);
        let (map, curves) = compute_curves(&cfg).unwrap();
        let dump = ContributionDump::from_map(map.as_contributions());
        let text = serde_json::to_string(&dump).unwrap();
        let back: ContributionDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_map().unwrap(), map);
        let table = builtin_weights(Descriptor::Ec, Connectivity::C8, Dimension::Two).unwrap();
        assert_eq!(reweight_dump(&back, &table).unwrap(), curves[0]);
    }

    #[test]
    fn dump_rejects_bad_shapes() {
        let cfg = RunConfig::generate(&[2, 2], Distribution::Uniform, 5);
        let (map, _) = compute_curves(&cfg).unwrap();
        let good = ContributionDump::from_map(map.as_contributions());

        let mut d = good.clone();
        d.contributions[0].births.pop();
        assert!(d.to_map().is_err());
        let mut d = good.clone();
        d.contributions[1].kind = "q1".into();
        assert!(d.to_map().is_err());
        let mut d = good.clone();
        d.contributions[0].kind = "q9".into();
        assert!(d.to_map().is_err());
        let mut d = good;
        d.dimension = 3;
        assert!(d.to_map().is_err());
    }

    #[test]
    fn bench_reports_speedup_against_serial() {
        let mut cfg = RunConfig::generate(&[64, 64], Distribution::Uniform, 1);
        cfg.repeats = 2;
        cfg.sweep_workers = vec![2, 4];
        let report = bench(&cfg).unwrap();
        assert_eq!(
            report.rows.iter().map(|r| r.workers).collect::<Vec<_>>(),
            vec![1, 2, 4]
        );
        assert_eq!(report.speedup(1), Some(1.0));
        assert_eq!(report.unit(), "MP/s");
        let mut text = Vec::new();
        report.write_text(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("1,"), "{text}");
        assert!(
            text.lines().nth(2).unwrap().ends_with(",MP/s,1.00"),
            "{text}"
        );
    }

    #[test]
    fn mean_std_uses_sample_deviation() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-12);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn low_memory_rejects_generated_input() {
        let mut cfg = RunConfig::generate(&[4, 4], Distribution::Uniform, 1);
        cfg.low_memory = true;
        assert!(prepare(&cfg).is_err());
    }

    #[test]
    fn parse_errors_exit_with_one() {
        assert_eq!(main_with_args(["ecurve", "curve"]), 1);
        assert_eq!(
            main_with_args([
                "ecurve",
                "curve",
                "--generate",
                "4x4",
                "--connectivity",
                "5"
            ]),
            1
        );
        assert_eq!(main_with_args(["ecurve", "frobnicate"]), 1);
    }
}
