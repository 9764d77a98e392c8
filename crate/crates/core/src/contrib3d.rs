//! 3D vertex contributions.
//!
//! Each lattice vertex `(i, j, k)` sees up to eight cells. Slot `s` of the
//! neighborhood holds cell `(i - 1 + di, j - 1 + dj, k - 1 + dk)` where
//! `s = di + 2 * dj + 4 * dk`, so slot bits are lattice coordinates and the
//! squared distance between two slots is the popcount of their XOR.
//!
//! A configuration of `n` active cells is classified by `n` together with the
//! number of cell pairs at squared distance 1, 2 and 3 (sharing a face, an
//! edge, or only a vertex). For `n >= 5` the pairs are taken over the empty
//! cells instead. These three counts determine the sum of pairwise Euclidean
//! distances, and they separate all 22 configurations up to cube symmetry.

use crate::error::{Error, Result};
use crate::histogram::{Contributions, Dimension, Histograms};
use crate::parallel::run_blocks;
use crate::source::{Reader3D, Source3D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(usize)]
pub enum ContributionType3D {
    Q10 = 0,
    Q20,
    Q21,
    Q22,
    Q30,
    Q31,
    Q32,
    Q40,
    Q41,
    Q42,
    Q43,
    Q44,
    Q45,
    Q50,
    Q51,
    Q52,
    Q60,
    Q61,
    Q62,
    Q70,
    Q80,
}

pub const TYPE_NAMES_3D: [&str; 21] = [
    "q10", "q20", "q21", "q22", "q30", "q31", "q32", "q40", "q41", "q42", "q43", "q44", "q45",
    "q50", "q51", "q52", "q60", "q61", "q62", "q70", "q80",
];

impl ContributionType3D {
    pub const ALL: [ContributionType3D; 21] = {
        use ContributionType3D::*;
        [
            Q10, Q20, Q21, Q22, Q30, Q31, Q32, Q40, Q41, Q42, Q43, Q44, Q45, Q50, Q51, Q52, Q60,
            Q61, Q62, Q70, Q80,
        ]
    };

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        TYPE_NAMES_3D[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        TYPE_NAMES_3D
            .iter()
            .position(|&n| n.eq_ignore_ascii_case(name))
            .map(|i| Self::ALL[i])
    }

    pub fn active_cells(self) -> u8 {
        use ContributionType3D::*;
        match self {
            Q10 => 1,
            Q20 | Q21 | Q22 => 2,
            Q30 | Q31 | Q32 => 3,
            Q40 | Q41 | Q42 | Q43 | Q44 | Q45 => 4,
            Q50 | Q51 | Q52 => 5,
            Q60 | Q61 | Q62 => 6,
            Q70 => 7,
            Q80 => 8,
        }
    }

    /// Pair classes that identify this type (over empty cells for 5+ actives).
    pub fn pair_classes(self) -> PairClassCounts {
        use ContributionType3D::*;
        let (face, edge, vertex) = match self {
            Q10 | Q70 | Q80 => (0, 0, 0),
            Q20 | Q60 => (1, 0, 0),
            Q21 | Q61 => (0, 1, 0),
            Q22 | Q62 => (0, 0, 1),
            Q30 | Q50 => (2, 1, 0),
            Q31 | Q51 => (1, 1, 1),
            Q32 | Q52 => (0, 3, 0),
            Q40 => (4, 2, 0),
            Q41 => (3, 3, 0),
            Q42 => (3, 2, 1),
            Q43 => (2, 3, 1),
            Q44 => (2, 2, 2),
            Q45 => (0, 6, 0),
        };
        PairClassCounts { face, edge, vertex }
    }
}

/// Counts of cell pairs at squared lattice distance 1, 2 and 3.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PairClassCounts {
    pub face: u8,
    pub edge: u8,
    pub vertex: u8,
}

impl PairClassCounts {
    /// Pair classes of a set of slots, computed from scratch.
    pub fn of_slots(slots: &[u8]) -> Self {
        let mut c = PairClassCounts::default();
        for (n, &a) in slots.iter().enumerate() {
            for &b in &slots[..n] {
                c.add_pair(a, b);
            }
        }
        c
    }

    #[inline(always)]
    fn add_pair(&mut self, a: u8, b: u8) {
        match (a ^ b).count_ones() {
            1 => self.face += 1,
            2 => self.edge += 1,
            _ => self.vertex += 1,
        }
    }

    pub fn pairs(&self) -> u32 {
        u32::from(self.face) + u32::from(self.edge) + u32::from(self.vertex)
    }

    /// Sum of pairwise Euclidean distances between the cell centers.
    pub fn f_adj(&self) -> f64 {
        f64::from(self.face)
            + f64::from(self.edge) * 2f64.sqrt()
            + f64::from(self.vertex) * 3f64.sqrt()
    }
}

#[inline(always)]
fn lookup(n: u8, c: PairClassCounts) -> Option<ContributionType3D> {
    use ContributionType3D::*;
    Some(match (n, c.face, c.edge, c.vertex) {
        (1, 0, 0, 0) => Q10,
        (2, 1, 0, 0) => Q20,
        (2, 0, 1, 0) => Q21,
        (2, 0, 0, 1) => Q22,
        (3, 2, 1, 0) => Q30,
        (3, 1, 1, 1) => Q31,
        (3, 0, 3, 0) => Q32,
        (4, 4, 2, 0) => Q40,
        (4, 3, 3, 0) => Q41,
        (4, 3, 2, 1) => Q42,
        (4, 2, 3, 1) => Q43,
        (4, 2, 2, 2) => Q44,
        (4, 0, 6, 0) => Q45,
        (5, 2, 1, 0) => Q50,
        (5, 1, 1, 1) => Q51,
        (5, 0, 3, 0) => Q52,
        (6, 1, 0, 0) => Q60,
        (6, 0, 1, 0) => Q61,
        (6, 0, 0, 1) => Q62,
        (7, 0, 0, 0) => Q70,
        (8, 0, 0, 0) => Q80,
        _ => return None,
    })
}

/// Maps `n` active cells and their pair classes to a contribution type.
/// For `n >= 5`, `classes` must describe the empty cells.
pub fn classify_config(n: u8, classes: PairClassCounts) -> Result<ContributionType3D> {
    lookup(n, classes).ok_or_else(|| {
        Error::Inconsistent(format!(
            "no 3D contribution type for {n} active cells with pair classes {classes:?}"
        ))
    })
}

/// Classifies a slot bitmask (bit `s` set = slot `s` active). Empty masks have no stored type.
pub fn classify_mask(mask: u8) -> Result<Option<ContributionType3D>> {
    let n = mask.count_ones() as u8;
    if n == 0 {
        return Ok(None);
    }
    let pick = if n >= 5 { !mask } else { mask };
    let slots: Vec<u8> = (0..8).filter(|s| pick >> s & 1 == 1).collect();
    classify_config(n, PairClassCounts::of_slots(&slots)).map(Some)
}

/// Cell levels around one vertex in slot order; absent cells hold `M + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexNeighborhood3D {
    pub data: [u32; 8],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionMap3D {
    width: usize,
    height: usize,
    depth: usize,
    hist: Histograms,
}

impl ContributionMap3D {
    pub fn new(width: usize, height: usize, depth: usize, max_level: u32) -> Self {
        ContributionMap3D {
            width,
            height,
            depth,
            hist: Histograms::new(TYPE_NAMES_3D.len(), max_level),
        }
    }

    pub fn from_histograms(
        width: usize,
        height: usize,
        depth: usize,
        hist: Histograms,
    ) -> Result<Self> {
        if hist.kinds() != TYPE_NAMES_3D.len() {
            return Err(Error::Config(format!(
                "3D map needs {} histograms, got {}",
                TYPE_NAMES_3D.len(),
                hist.kinds()
            )));
        }
        Ok(ContributionMap3D {
            width,
            height,
            depth,
            hist,
        })
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

    pub fn births(&self, kind: ContributionType3D) -> &[u64] {
        self.hist.births(kind.index())
    }

    pub fn deaths(&self, kind: ContributionType3D) -> &[u64] {
        self.hist.deaths(kind.index())
    }

    pub fn merge(&mut self, other: &ContributionMap3D) -> Result<()> {
        self.hist.merge(&other.hist)
    }
}

impl Contributions for ContributionMap3D {
    fn dimension(&self) -> Dimension {
        Dimension::Three
    }

    fn max_level(&self) -> u32 {
        self.hist.max_level()
    }

    fn cell_dims(&self) -> Vec<usize> {
        vec![self.width, self.height, self.depth]
    }

    fn type_names(&self) -> &'static [&'static str] {
        &TYPE_NAMES_3D
    }

    fn histograms(&self) -> &Histograms {
        &self.hist
    }
}

/// Collects the eight cell levels around vertex `(i, j, k)`; every slot is
/// filled under its own boundary condition.
#[inline]
pub fn fill_data_3d<R: Reader3D>(
    reader: &mut R,
    dims: (usize, usize, usize),
    max_level: u32,
    i: usize,
    j: usize,
    k: usize,
) -> Result<VertexNeighborhood3D> {
    let (w, h, d) = dims;
    let sentinel = max_level + 1;
    let mut data = [sentinel; 8];
    let row_ok = [i > 0, i < h];
    let col_ok = [j > 0, j < w];
    let (below, above) = (k > 0, k < d);
    let mut run = [0u32; 2];
    for (di, _) in row_ok.iter().enumerate().filter(|(_, &ok)| ok) {
        for (dj, _) in col_ok.iter().enumerate().filter(|(_, &ok)| ok) {
            let (row, col) = (i + di - 1, j + dj - 1);
            let slot = di + 2 * dj;
            match (below, above) {
                (true, true) => {
                    reader.read_run(row, col, k - 1, &mut run)?;
                    data[slot] = run[0];
                    data[slot + 4] = run[1];
                }
                (true, false) => {
                    reader.read_run(row, col, k - 1, &mut run[..1])?;
                    data[slot] = run[0];
                }
                (false, true) => {
                    reader.read_run(row, col, k, &mut run[..1])?;
                    data[slot + 4] = run[0];
                }
                (false, false) => {}
            }
        }
    }
    Ok(VertexNeighborhood3D { data })
}

/// Records the eight stages of one neighborhood into `map`.
///
/// Pair classes of the active cells are kept as a running sum while the
/// first four cells are added; stages five to eight classify the at most
/// three remaining empty cells, accumulated from the back.
#[inline]
pub fn accumulate_vertex_3d(
    nbhd: &VertexNeighborhood3D,
    map: &mut ContributionMap3D,
) -> Result<()> {
    let mut keys = [0u32; 8];
    for (s, key) in keys.iter_mut().enumerate() {
        *key = (nbhd.data[s] << 3) | s as u32;
    }
    keys.sort_unstable();
    let level = keys.map(|k| k >> 3);
    let pos = keys.map(|k| (k & 7) as u8);

    let mut stages = [ContributionType3D::Q10; 8];
    let mut active = PairClassCounts::default();
    for n in 1..=4usize {
        let new = pos[n - 1];
        for &old in &pos[..n - 1] {
            active.add_pair(new, old);
        }
        stages[n - 1] = classify_config(n as u8, active)?;
    }
    let mut empty = PairClassCounts::default();
    for n in (5..=8usize).rev() {
        // empties at stage n are pos[n..8]; pos[n] joins going from n + 1 to n
        if n < 8 {
            let new = pos[n];
            for &old in &pos[n + 1..] {
                empty.add_pair(new, old);
            }
        }
        stages[n - 1] = classify_config(n as u8, empty)?;
    }

    let h = &mut map.hist;
    for n in 0..7 {
        let kind = stages[n] as usize;
        h.birth(kind, level[n]);
        h.death(kind, level[n + 1]);
    }
    h.birth(stages[7] as usize, level[7]);
    Ok(())
}

fn gather_slabs<S: Source3D>(
    source: &S,
    rows: std::ops::Range<usize>,
) -> Result<ContributionMap3D> {
    let dims = (source.width(), source.height(), source.depth());
    let m = source.max_level();
    let mut reader = source.reader()?;
    let mut map = ContributionMap3D::new(dims.0, dims.1, dims.2, m);
    for i in rows {
        for j in 0..=dims.0 {
            for k in 0..=dims.2 {
                let nbhd = fill_data_3d(&mut reader, dims, m, i, j, k)?;
                accumulate_vertex_3d(&nbhd, &mut map)?;
            }
        }
    }
    Ok(map)
}

/// Single pass over all `(w + 1)(h + 1)(d + 1)` vertices.
pub fn gather_3d_serial<S: Source3D>(source: &S) -> Result<ContributionMap3D> {
    gather_slabs(source, 0..source.height() + 1)
}

/// Contiguous `i`-slabs per worker, private maps merged after join.
/// Bit-identical to [`gather_3d_serial`].
pub fn gather_3d_parallel<S: Source3D>(source: &S, workers: usize) -> Result<ContributionMap3D> {
    let maps = run_blocks(source.height() + 1, workers, |rows| {
        gather_slabs(source, rows)
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
    use crate::field::{random_field_3d, Distribution, Field3D};
    use ContributionType3D::*;

    fn cumulative(map: &ContributionMap3D, kind: ContributionType3D, c: usize) -> i64 {
        let b: u64 = map.births(kind)[..=c].iter().sum();
        let d: u64 = map.deaths(kind)[..=c].iter().sum();
        b as i64 - d as i64
    }

    fn mask_of(cells: &[(u8, u8, u8)]) -> u8 {
        cells
            .iter()
            .fold(0, |m, &(x, y, z)| m | 1 << (x + 2 * y + 4 * z))
    }

    #[test]
    fn corner_vertex_has_one_cell_in_last_slot() {
        let f = Field3D::new(2, 2, 2, (0..8).collect(), 9).unwrap();
        let n = fill_data_3d(&mut &f, (2, 2, 2), 9, 0, 0, 0).unwrap();
        assert_eq!(n.data, [10, 10, 10, 10, 10, 10, 10, 0]);
    }

    #[test]
    fn interior_vertex_has_all_cells() {
        let f = Field3D::new(2, 2, 2, (0..8).collect(), 9).unwrap();
        let n = fill_data_3d(&mut &f, (2, 2, 2), 9, 1, 1, 1).unwrap();
        // slot di + 2dj + 4dk holds cell (di, dj, dk), flat index (di*2 + dj)*2 + dk
        let expect: Vec<u32> = (0..8u32)
            .map(|s| {
                let (di, dj, dk) = (s & 1, s >> 1 & 1, s >> 2 & 1);
                (di * 2 + dj) * 2 + dk
            })
            .collect();
        assert_eq!(n.data.to_vec(), expect);
    }

    #[test]
    fn face_center_vertex() {
        let f = Field3D::new(2, 2, 2, (0..8).collect(), 9).unwrap();
        let n = fill_data_3d(&mut &f, (2, 2, 2), 9, 0, 1, 1).unwrap();
        let sentinels: Vec<usize> = (0..8).filter(|&s| n.data[s] == 10).collect();
        assert_eq!(sentinels, vec![0, 2, 4, 6]);
        assert_eq!([n.data[1], n.data[3], n.data[5], n.data[7]], [0, 2, 1, 3]);
    }

    #[test]
    fn two_cell_classes() {
        assert_eq!(
            classify_mask(mask_of(&[(0, 0, 0), (0, 0, 1)])).unwrap(),
            Some(Q20)
        );
        assert_eq!(
            classify_mask(mask_of(&[(0, 0, 0), (0, 1, 1)])).unwrap(),
            Some(Q21)
        );
        assert_eq!(
            classify_mask(mask_of(&[(0, 0, 0), (1, 1, 1)])).unwrap(),
            Some(Q22)
        );
        let plane = mask_of(&[(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]);
        assert_eq!(classify_mask(plane).unwrap(), Some(Q40));
        assert_eq!(classify_mask(0).unwrap(), None);
        assert_eq!(classify_mask(0xff).unwrap(), Some(Q80));
    }

    #[test]
    fn classify_rejects_unknown_triple() {
        let bad = PairClassCounts {
            face: 3,
            edge: 0,
            vertex: 0,
        };
        assert!(matches!(
            classify_config(3, bad),
            Err(Error::Inconsistent(_))
        ));
        assert!(classify_config(9, PairClassCounts::default()).is_err());
    }

    #[test]
    fn type_pair_classes_round_trip() {
        for t in ContributionType3D::ALL {
            assert_eq!(
                classify_config(t.active_cells(), t.pair_classes()).unwrap(),
                t
            );
        }
    }

    #[test]
    fn single_cell_stage_intervals() {
        let m = 6;
        let mut data = [m + 1; 8];
        data[5] = 3;
        let mut map = ContributionMap3D::new(1, 1, 1, m);
        accumulate_vertex_3d(&VertexNeighborhood3D { data }, &mut map).unwrap();
        for c in 0..=m as usize {
            assert_eq!(cumulative(&map, Q10, c), i64::from(c >= 3));
        }
        assert_eq!(map.histograms().total_births(), 8);
        assert_eq!(map.histograms().total_deaths(), 7);
    }

    #[test]
    fn all_zero_neighborhood() {
        let mut map = ContributionMap3D::new(1, 1, 1, 4);
        accumulate_vertex_3d(&VertexNeighborhood3D { data: [0; 8] }, &mut map).unwrap();
        for c in 0..=4 {
            assert_eq!(cumulative(&map, Q80, c), 1);
            for t in ContributionType3D::ALL.iter().filter(|&&t| t != Q80) {
                assert_eq!(cumulative(&map, *t, c), 0, "{t:?}");
            }
        }
    }

    #[test]
    fn vertex_adjacent_pair_stages() {
        let m = 5;
        let mut data = [m + 1; 8];
        data[0] = 0;
        data[7] = 2;
        let mut map = ContributionMap3D::new(1, 1, 1, m);
        accumulate_vertex_3d(&VertexNeighborhood3D { data }, &mut map).unwrap();
        for c in 0..=m as usize {
            assert_eq!(cumulative(&map, Q10, c), i64::from(c < 2));
            assert_eq!(cumulative(&map, Q22, c), i64::from(c >= 2));
        }
    }

    #[test]
    fn single_voxel_gather() {
        let f = Field3D::new(1, 1, 1, vec![2], 3).unwrap();
        let map = gather_3d_serial(&f).unwrap();
        for c in 0..=3 {
            assert_eq!(cumulative(&map, Q10, c), if c >= 2 { 8 } else { 0 });
        }
    }

    #[test]
    fn domino_gather() {
        let f = Field3D::new(1, 1, 2, vec![0, 0], 1).unwrap();
        let map = gather_3d_serial(&f).unwrap();
        // 12 vertices: 8 corners see one cell, the 4 middle ones a face pair.
        assert_eq!(cumulative(&map, Q10, 0), 8);
        assert_eq!(cumulative(&map, Q20, 0), 4);
        for t in ContributionType3D::ALL
            .iter()
            .filter(|&&t| t != Q10 && t != Q20)
        {
            assert_eq!(cumulative(&map, *t, 0), 0, "{t:?}");
        }
    }

    #[test]
    fn inactive_volume_has_no_counts_below_max() {
        let f = Field3D::new(2, 3, 2, vec![5; 12], 5).unwrap();
        let map = gather_3d_serial(&f).unwrap();
        for t in ContributionType3D::ALL {
            for c in 0..5 {
                assert_eq!(cumulative(&map, t, c), 0);
            }
        }
    }

    #[test]
    fn full_volume_q80_is_interior_vertices() {
        let f = random_field_3d(4, 3, 5, Distribution::Uniform, 1, 9).unwrap();
        let map = gather_3d_serial(&f).unwrap();
        assert_eq!(cumulative(&map, Q80, 9), 3 * 2 * 4);
    }

    #[test]
    fn parallel_matches_serial() {
        let f = random_field_3d(6, 9, 5, Distribution::Uniform, 4, 15).unwrap();
        let serial = gather_3d_serial(&f).unwrap();
        for workers in 1..=12 {
            assert_eq!(gather_3d_parallel(&f, workers).unwrap(), serial);
        }
    }
}
