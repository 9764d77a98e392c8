//! 2D vertex contributions.
//!
//! Every lattice vertex `(i, j)`, `0 <= i <= h`, `0 <= j <= w`, sees the four
//! faces around it in slot order `[NW, NE, SW, SE]`. Sorting those levels
//! yields the filtration level at which the neighborhood passes through one,
//! two, three and four active faces; each stage is recorded as a birth at the
//! level it is entered and a death at the level it is left.

use crate::error::Result;
use crate::histogram::{Contributions, Dimension, Histograms};
use crate::parallel::run_blocks;
use crate::source::{Reader2D, Source2D};

/// Stored 2D contribution types. The empty type is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(usize)]
pub enum ContributionType2D {
    /// One active face.
    Q1 = 0,
    /// Two edge-adjacent faces.
    Q2,
    /// Two diagonal faces.
    QD,
    /// Three faces.
    Q3,
    /// All four faces.
    Q4,
}

pub const TYPE_NAMES_2D: [&str; 5] = ["q1", "q2", "qd", "q3", "q4"];

impl ContributionType2D {
    pub const ALL: [ContributionType2D; 5] = [
        ContributionType2D::Q1,
        ContributionType2D::Q2,
        ContributionType2D::QD,
        ContributionType2D::Q3,
        ContributionType2D::Q4,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        TYPE_NAMES_2D[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        TYPE_NAMES_2D
            .iter()
            .position(|&n| n.eq_ignore_ascii_case(name))
            .map(|i| Self::ALL[i])
    }

    pub fn active_faces(self) -> usize {
        match self {
            ContributionType2D::Q1 => 1,
            ContributionType2D::Q2 | ContributionType2D::QD => 2,
            ContributionType2D::Q3 => 3,
            ContributionType2D::Q4 => 4,
        }
    }
}

/// Slot of a face within a vertex neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Slot2D {
    NW = 0,
    NE = 1,
    SW = 2,
    SE = 3,
}

impl Slot2D {
    pub const ALL: [Slot2D; 4] = [Slot2D::NW, Slot2D::NE, Slot2D::SW, Slot2D::SE];

    /// `(row, col)` of the slot in the 2x2 lattice.
    pub fn position(self) -> (u8, u8) {
        let s = self as u8;
        (s >> 1, s & 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    Edge,
    Diagonal,
}

/// Two distinct slots are diagonal iff they differ in both lattice coordinates.
#[inline]
pub fn diagonal_check(a: Slot2D, b: Slot2D) -> Adjacency {
    if (a as u8 ^ b as u8) == 3 {
        Adjacency::Diagonal
    } else {
        Adjacency::Edge
    }
}

/// Face levels around one vertex, `[NW, NE, SW, SE]`; absent faces hold `M + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexNeighborhood2D {
    pub data: [u32; 4],
}

/// Two-pass contribution histograms of a 2D field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionMap2D {
    width: usize,
    height: usize,
    hist: Histograms,
}

impl ContributionMap2D {
    pub fn new(width: usize, height: usize, max_level: u32) -> Self {
        ContributionMap2D {
            width,
            height,
            hist: Histograms::new(TYPE_NAMES_2D.len(), max_level),
        }
    }

    /// Rebuilds a map from raw histograms, e.g. a deserialized dump.
    pub fn from_histograms(width: usize, height: usize, hist: Histograms) -> Result<Self> {
        if hist.kinds() != TYPE_NAMES_2D.len() {
            return Err(crate::Error::Config(format!(
                "2D map needs {} histograms, got {}",
                TYPE_NAMES_2D.len(),
                hist.kinds()
            )));
        }
        Ok(ContributionMap2D {
            width,
            height,
            hist,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn births(&self, kind: ContributionType2D) -> &[u64] {
        self.hist.births(kind.index())
    }

    pub fn deaths(&self, kind: ContributionType2D) -> &[u64] {
        self.hist.deaths(kind.index())
    }

    /// Adds another map's histograms into this one.
    pub fn merge(&mut self, other: &ContributionMap2D) -> Result<()> {
        self.hist.merge(&other.hist)
    }
}

impl Contributions for ContributionMap2D {
    fn dimension(&self) -> Dimension {
        Dimension::Two
    }

    fn max_level(&self) -> u32 {
        self.hist.max_level()
    }

    fn cell_dims(&self) -> Vec<usize> {
        vec![self.width, self.height]
    }

    fn type_names(&self) -> &'static [&'static str] {
        &TYPE_NAMES_2D
    }

    fn histograms(&self) -> &Histograms {
        &self.hist
    }
}

#[inline(always)]
fn fill_row<R: Reader2D>(
    reader: &mut R,
    row: usize,
    j: usize,
    width: usize,
    slots: &mut [u32],
) -> Result<()> {
    match (j > 0, j < width) {
        (true, true) => reader.read_run(row, j - 1, &mut slots[..2]),
        (true, false) => reader.read_run(row, j - 1, &mut slots[..1]),
        (false, true) => reader.read_run(row, j, &mut slots[1..2]),
        (false, false) => Ok(()),
    }
}

/// Collects the four face levels around vertex `(i, j)` of a `width x height`
/// field. Each slot is filled independently of the others.
#[inline]
pub fn neighborhood_data_2d<R: Reader2D>(
    reader: &mut R,
    width: usize,
    height: usize,
    max_level: u32,
    i: usize,
    j: usize,
) -> Result<VertexNeighborhood2D> {
    let mut data = [max_level + 1; 4];
    if i > 0 {
        fill_row(reader, i - 1, j, width, &mut data[0..2])?;
    }
    if i < height {
        fill_row(reader, i, j, width, &mut data[2..4])?;
    }
    Ok(VertexNeighborhood2D { data })
}

#[inline(always)]
fn sort4(k: &mut [u32; 4]) {
    #[inline(always)]
    fn cswap(k: &mut [u32; 4], a: usize, b: usize) {
        if k[a] > k[b] {
            k.swap(a, b);
        }
    }
    cswap(k, 0, 1);
    cswap(k, 2, 3);
    cswap(k, 0, 2);
    cswap(k, 1, 3);
    cswap(k, 1, 2);
}

/// Records the four stages of one neighborhood into `map`.
#[inline]
pub fn accumulate_vertex_2d(nbhd: &VertexNeighborhood2D, map: &mut ContributionMap2D) {
    // level << 2 | slot: sorting the keys is a stable sort of levels by slot.
    let mut keys = [
        nbhd.data[0] << 2,
        (nbhd.data[1] << 2) | 1,
        (nbhd.data[2] << 2) | 2,
        (nbhd.data[3] << 2) | 3,
    ];
    sort4(&mut keys);
    let d = keys.map(|k| k >> 2);
    let two = if ((keys[0] ^ keys[1]) & 3) == 3 {
        ContributionType2D::QD
    } else {
        ContributionType2D::Q2
    };

    let h = &mut map.hist;
    h.birth(ContributionType2D::Q1 as usize, d[0]);
    h.death(ContributionType2D::Q1 as usize, d[1]);
    h.birth(two as usize, d[1]);
    h.death(two as usize, d[2]);
    h.birth(ContributionType2D::Q3 as usize, d[2]);
    h.death(ContributionType2D::Q3 as usize, d[3]);
    h.birth(ContributionType2D::Q4 as usize, d[3]);
}

fn gather_rows<S: Source2D>(source: &S, rows: std::ops::Range<usize>) -> Result<ContributionMap2D> {
    let (w, h, m) = (source.width(), source.height(), source.max_level());
    let mut reader = source.reader()?;
    let mut map = ContributionMap2D::new(w, h, m);
    for i in rows {
        for j in 0..=w {
            let nbhd = neighborhood_data_2d(&mut reader, w, h, m, i, j)?;
            accumulate_vertex_2d(&nbhd, &mut map);
        }
    }
    Ok(map)
}

/// Single pass over all `(w + 1)(h + 1)` vertices.
pub fn gather_2d_serial<S: Source2D>(source: &S) -> Result<ContributionMap2D> {
    gather_rows(source, 0..source.height() + 1)
}

/// Vertex rows split into contiguous blocks, one private map per worker,
/// summed after all workers join. Bit-identical to [`gather_2d_serial`].
pub fn gather_2d_parallel<S: Source2D>(source: &S, workers: usize) -> Result<ContributionMap2D> {
    let maps = run_blocks(source.height() + 1, workers, |rows| {
        gather_rows(source, rows)
    })?;
    let mut iter = maps.into_iter();
    let mut total = iter.next().expect("at least one block");
    for m in iter {
        total.merge(&m)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field2D;

    fn field(w: usize, h: usize, m: u32, v: &[u16]) -> Field2D {
        Field2D::new(w, h, v.to_vec(), m).unwrap()
    }

    fn cumulative(map: &ContributionMap2D, kind: ContributionType2D, c: usize) -> i64 {
        let b: u64 = map.births(kind)[..=c].iter().sum();
        let d: u64 = map.deaths(kind)[..=c].iter().sum();
        b as i64 - d as i64
    }

    #[test]
    fn corner_vertex_neighborhood() {
        let f = field(2, 2, 9, &[1, 2, 3, 4]);
        let n = neighborhood_data_2d(&mut &f, 2, 2, 9, 0, 0).unwrap();
        assert_eq!(n.data, [10, 10, 10, 1]);
    }

    #[test]
    fn interior_vertex_neighborhood() {
        let f = field(2, 2, 9, &[1, 2, 3, 4]);
        let n = neighborhood_data_2d(&mut &f, 2, 2, 9, 1, 1).unwrap();
        assert_eq!(n.data, [1, 2, 3, 4]);
    }

    #[test]
    fn top_edge_vertex_neighborhood() {
        let f = field(2, 2, 9, &[1, 2, 3, 4]);
        let n = neighborhood_data_2d(&mut &f, 2, 2, 9, 0, 1).unwrap();
        assert_eq!(n.data, [10, 10, 1, 2]);
        let n = neighborhood_data_2d(&mut &f, 2, 2, 9, 2, 2).unwrap();
        assert_eq!(n.data, [4, 10, 10, 10]);
    }

    #[test]
    fn diagonal_check_cases() {
        assert_eq!(diagonal_check(Slot2D::NW, Slot2D::NE), Adjacency::Edge);
        assert_eq!(diagonal_check(Slot2D::NW, Slot2D::SW), Adjacency::Edge);
        assert_eq!(diagonal_check(Slot2D::NW, Slot2D::SE), Adjacency::Diagonal);
        assert_eq!(diagonal_check(Slot2D::NE, Slot2D::SW), Adjacency::Diagonal);
        for a in Slot2D::ALL {
            for b in Slot2D::ALL {
                if a == b {
                    continue;
                }
                let (ra, ca) = a.position();
                let (rb, cb) = b.position();
                let manhattan = ra.abs_diff(rb) + ca.abs_diff(cb);
                assert_eq!(diagonal_check(a, b) == Adjacency::Diagonal, manhattan == 2);
            }
        }
    }

    #[test]
    fn single_present_face() {
        let m = 5;
        let mut map = ContributionMap2D::new(1, 1, m);
        accumulate_vertex_2d(&VertexNeighborhood2D { data: [0, 6, 6, 6] }, &mut map);
        use ContributionType2D::*;
        assert_eq!(map.births(Q1)[0], 1);
        assert_eq!(map.deaths(Q1)[6], 1);
        assert_eq!(map.births(Q2)[6], 1);
        assert_eq!(map.deaths(Q2)[6], 1);
        assert_eq!(map.births(Q3)[6], 1);
        assert_eq!(map.deaths(Q3)[6], 1);
        assert_eq!(map.births(Q4)[6], 1);
        assert_eq!(map.histograms().total_births(), 4);
        assert_eq!(map.histograms().total_deaths(), 3);
    }

    #[test]
    fn diagonal_pair_cancels_when_tied() {
        // NW=7, NE=2, SW=5, SE=5: the two smallest (NE, SW) are diagonal.
        let mut map = ContributionMap2D::new(1, 1, 9);
        accumulate_vertex_2d(&VertexNeighborhood2D { data: [7, 2, 5, 5] }, &mut map);
        use ContributionType2D::*;
        assert_eq!(map.births(QD)[5], 1);
        assert_eq!(map.deaths(QD)[5], 1);
        assert!(map.births(Q2).iter().all(|&b| b == 0));
        let active = |k, c| cumulative(&map, k, c);
        for c in 0..=9 {
            assert_eq!(active(Q1, c), i64::from((2..=4).contains(&c)), "Q1 at {c}");
            assert_eq!(active(QD, c), 0);
            assert_eq!(active(Q3, c), i64::from((5..=6).contains(&c)), "Q3 at {c}");
            assert_eq!(active(Q4, c), i64::from(c >= 7), "Q4 at {c}");
        }
    }

    #[test]
    fn walkthrough_first_two_faces() {
        // First face at 0, the diagonal partner at 1.
        let mut map = ContributionMap2D::new(1, 1, 3);
        accumulate_vertex_2d(&VertexNeighborhood2D { data: [0, 2, 3, 1] }, &mut map);
        use ContributionType2D::*;
        assert_eq!(map.births(Q1)[0], 1);
        assert_eq!(map.deaths(Q1)[1], 1);
        assert_eq!(map.births(QD)[1], 1);
    }

    #[test]
    fn one_by_one_field() {
        let f = field(1, 1, 4, &[2]);
        let map = gather_2d_serial(&f).unwrap();
        for c in 0..=4 {
            let expect = if c >= 2 { 4 } else { 0 };
            assert_eq!(cumulative(&map, ContributionType2D::Q1, c), expect);
        }
    }

    #[test]
    fn all_zero_two_by_two() {
        let f = field(2, 2, 3, &[0; 4]);
        let map = gather_2d_serial(&f).unwrap();
        use ContributionType2D::*;
        assert_eq!(cumulative(&map, Q1, 0), 4);
        assert_eq!(cumulative(&map, Q2, 0), 4);
        assert_eq!(cumulative(&map, QD, 0), 0);
        assert_eq!(cumulative(&map, Q3, 0), 0);
        assert_eq!(cumulative(&map, Q4, 0), 1);
    }

    #[test]
    fn inactive_field_has_no_counts_below_max() {
        let f = field(3, 2, 6, &[6; 6]);
        let map = gather_2d_serial(&f).unwrap();
        for kind in ContributionType2D::ALL {
            for c in 0..6 {
                assert_eq!(cumulative(&map, kind, c), 0);
            }
        }
    }

    #[test]
    fn full_field_q4_count_is_interior_vertices() {
        let f = crate::field::random_field_2d(7, 5, crate::Distribution::Uniform, 3, 12).unwrap();
        let map = gather_2d_serial(&f).unwrap();
        assert_eq!(cumulative(&map, ContributionType2D::Q4, 12), 6 * 4);
    }

    #[test]
    fn parallel_matches_serial() {
        let f = crate::field::random_field_2d(33, 17, crate::Distribution::Uniform, 9, 30).unwrap();
        let serial = gather_2d_serial(&f).unwrap();
        for workers in 1..=20 {
            assert_eq!(
                gather_2d_parallel(&f, workers).unwrap(),
                serial,
                "{workers}"
            );
        }
        assert!(gather_2d_parallel(&f, 0).is_err());
    }

    #[test]
    fn merge_is_additive() {
        let f = crate::field::random_field_2d(9, 9, crate::Distribution::Normal, 1, 20).unwrap();
        let top = gather_rows(&f, 0..4).unwrap();
        let bottom = gather_rows(&f, 4..10).unwrap();
        let mut merged = top.clone();
        merged.merge(&bottom).unwrap();
        assert_eq!(merged, gather_2d_serial(&f).unwrap());
        let other = ContributionMap2D::new(9, 9, 21);
        assert!(merged.merge(&other).is_err());
    }
}
