//! Brute-force reference computations.
//!
//! Each level is binarized and the induced cubical complex is counted
//! directly: every vertex, edge, face and cell, or every boundary element.
//! Cost is `O(cells * levels)`. Nothing here touches the contribution
//! kernels; these are the ground truth the kernels are tested against.

use std::collections::VecDeque;

use crate::field::{Field2D, Field3D};

/// Active faces of a 2D field at one filtration level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryComplex2D {
    pub width: usize,
    pub height: usize,
    active: Vec<bool>,
}

impl BinaryComplex2D {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut active = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                active.push(f(i, j));
            }
        }
        BinaryComplex2D {
            width,
            height,
            active,
        }
    }

    /// Face `(i, j)` with signed indices; anything outside the grid is inactive.
    pub fn face(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize >= self.height || j as usize >= self.width {
            return false;
        }
        self.active[i as usize * self.width + j as usize]
    }

    pub fn union(&self, other: &Self) -> Self {
        BinaryComplex2D::from_fn(self.width, self.height, |i, j| {
            self.face(i as isize, j as isize) || other.face(i as isize, j as isize)
        })
    }

    pub fn intersection(&self, other: &Self) -> Self {
        BinaryComplex2D::from_fn(self.width, self.height, |i, j| {
            self.face(i as isize, j as isize) && other.face(i as isize, j as isize)
        })
    }
}

/// Active cells of a 3D field at one filtration level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryComplex3D {
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    active: Vec<bool>,
}

impl BinaryComplex3D {
    pub fn from_fn(
        width: usize,
        height: usize,
        depth: usize,
        f: impl Fn(usize, usize, usize) -> bool,
    ) -> Self {
        let mut active = Vec::with_capacity(width * height * depth);
        for i in 0..height {
            for j in 0..width {
                for k in 0..depth {
                    active.push(f(i, j, k));
                }
            }
        }
        BinaryComplex3D {
            width,
            height,
            depth,
            active,
        }
    }

    pub fn cell(&self, i: isize, j: isize, k: isize) -> bool {
        if i < 0 || j < 0 || k < 0 {
            return false;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.height || j >= self.width || k >= self.depth {
            return false;
        }
        self.active[(i * self.width + j) * self.depth + k]
    }

    pub fn union(&self, other: &Self) -> Self {
        BinaryComplex3D::from_fn(self.width, self.height, self.depth, |i, j, k| {
            let (i, j, k) = (i as isize, j as isize, k as isize);
            self.cell(i, j, k) || other.cell(i, j, k)
        })
    }

    pub fn intersection(&self, other: &Self) -> Self {
        BinaryComplex3D::from_fn(self.width, self.height, self.depth, |i, j, k| {
            let (i, j, k) = (i as isize, j as isize, k as isize);
            self.cell(i, j, k) && other.cell(i, j, k)
        })
    }
}

/// Faces with level `<= c`.
pub fn binarize_2d(field: &Field2D, c: u32) -> BinaryComplex2D {
    BinaryComplex2D::from_fn(field.width(), field.height(), |i, j| {
        u32::from(field.get(i, j)) <= c
    })
}

/// Cells with level `<= c`.
pub fn binarize_3d(field: &Field3D, c: u32) -> BinaryComplex3D {
    BinaryComplex3D::from_fn(field.width(), field.height(), field.depth(), |i, j, k| {
        u32::from(field.get(i, j, k)) <= c
    })
}

/// Simplex counts of the closure of the active faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts2D {
    pub vertices: i64,
    pub edges: i64,
    pub faces: i64,
}

/// Marks every vertex, edge and face induced by the active faces and counts them.
pub fn simplex_counts_2d(x: &BinaryComplex2D) -> Counts2D {
    let (w, h) = (x.width, x.height);
    let mut vertices = vec![false; (h + 1) * (w + 1)];
    // horizontal edge (i, j): (i, j)-(i, j+1); vertical edge (i, j): (i, j)-(i+1, j)
    let mut horizontal = vec![false; (h + 1) * w];
    let mut vertical = vec![false; h * (w + 1)];
    let mut faces = 0;
    for i in 0..h {
        for j in 0..w {
            if !x.face(i as isize, j as isize) {
                continue;
            }
            faces += 1;
            for (di, dj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                vertices[(i + di) * (w + 1) + j + dj] = true;
            }
            horizontal[i * w + j] = true;
            horizontal[(i + 1) * w + j] = true;
            vertical[i * (w + 1) + j] = true;
            vertical[i * (w + 1) + j + 1] = true;
        }
    }
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as i64;
    Counts2D {
        vertices: count(&vertices),
        edges: count(&horizontal) + count(&vertical),
        faces,
    }
}

/// `V - E + F` of the induced complex (faces sharing a vertex are connected).
pub fn euler_bruteforce_2d(x: &BinaryComplex2D) -> i64 {
    let c = simplex_counts_2d(x);
    c.vertices - c.edges + c.faces
}

const EDGE_STEPS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
const VERTEX_STEPS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Connected components of faces equal to `foreground` inside rows/cols `lo..hi`.
fn flood_components(
    x: &BinaryComplex2D,
    foreground: bool,
    lo: isize,
    hi: (isize, isize),
    steps: &[(isize, isize)],
) -> i64 {
    let rows = (hi.0 - lo) as usize;
    let cols = (hi.1 - lo) as usize;
    let idx = |i: isize, j: isize| (i - lo) as usize * cols + (j - lo) as usize;
    let mut seen = vec![false; rows * cols];
    let mut queue = VecDeque::new();
    let mut n = 0;
    for i in lo..hi.0 {
        for j in lo..hi.1 {
            if x.face(i, j) != foreground || seen[idx(i, j)] {
                continue;
            }
            n += 1;
            seen[idx(i, j)] = true;
            queue.push_back((i, j));
            while let Some((a, b)) = queue.pop_front() {
                for &(di, dj) in steps {
                    let (p, q) = (a + di, b + dj);
                    if p < lo || q < lo || p >= hi.0 || q >= hi.1 {
                        continue;
                    }
                    if x.face(p, q) == foreground && !seen[idx(p, q)] {
                        seen[idx(p, q)] = true;
                        queue.push_back((p, q));
                    }
                }
            }
        }
    }
    n
}

/// Components minus holes by flood fill. The background is padded by one
/// ring of inactive faces so the outside is a single component.
fn euler_by_flood_fill(
    x: &BinaryComplex2D,
    foreground_steps: &[(isize, isize)],
    background_steps: &[(isize, isize)],
) -> i64 {
    let (w, h) = (x.width as isize, x.height as isize);
    let objects = flood_components(x, true, 0, (h, w), foreground_steps);
    let background = flood_components(x, false, -1, (h + 1, w + 1), background_steps);
    objects - (background - 1)
}

/// EC with 4-connected foreground (and 8-connected background).
pub fn euler_4c_bruteforce_2d(x: &BinaryComplex2D) -> i64 {
    euler_by_flood_fill(x, &EDGE_STEPS, &VERTEX_STEPS)
}

/// EC with 8-connected foreground by flood fill; agrees with [`euler_bruteforce_2d`].
pub fn euler_8c_flood_fill_2d(x: &BinaryComplex2D) -> i64 {
    euler_by_flood_fill(x, &VERTEX_STEPS, &EDGE_STEPS)
}

/// Grid edges incident to exactly one active face.
pub fn perimeter_oracle_2d(x: &BinaryComplex2D) -> i64 {
    let (w, h) = (x.width as isize, x.height as isize);
    let mut n = 0;
    // horizontal edges separate faces (i - 1, j) and (i, j)
    for i in 0..=h {
        for j in 0..w {
            n += i64::from(x.face(i - 1, j) != x.face(i, j));
        }
    }
    // vertical edges separate faces (i, j - 1) and (i, j)
    for i in 0..h {
        for j in 0..=w {
            n += i64::from(x.face(i, j - 1) != x.face(i, j));
        }
    }
    n
}

pub fn area_oracle_2d(x: &BinaryComplex2D) -> i64 {
    x.active.iter().filter(|&&b| b).count() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts3D {
    pub vertices: i64,
    pub edges: i64,
    pub faces: i64,
    pub cells: i64,
}

/// Marks every simplex induced by the active cells and counts them.
pub fn simplex_counts_3d(x: &BinaryComplex3D) -> Counts3D {
    let (w, h, d) = (x.width, x.height, x.depth);
    let (vi, vj, vk) = (h + 1, w + 1, d + 1);
    let vid = |i: usize, j: usize, k: usize| (i * vj + j) * vk + k;
    let mut vertices = vec![false; vi * vj * vk];
    // edges and faces keyed by their lowest vertex, one array per orientation
    let mut edges = [
        vec![false; vi * vj * vk],
        vec![false; vi * vj * vk],
        vec![false; vi * vj * vk],
    ];
    let mut faces = [
        vec![false; vi * vj * vk],
        vec![false; vi * vj * vk],
        vec![false; vi * vj * vk],
    ];
    let mut cells = 0;
    for i in 0..h {
        for j in 0..w {
            for k in 0..d {
                if !x.cell(i as isize, j as isize, k as isize) {
                    continue;
                }
                cells += 1;
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            vertices[vid(i + a, j + b, k + c)] = true;
                        }
                        // edge along i at (i, j+a, k+b); along j at (i+a, j, k+b); along k at (i+a, j+b, k)
                        edges[0][vid(i, j + a, k + b)] = true;
                        edges[1][vid(i + a, j, k + b)] = true;
                        edges[2][vid(i + a, j + b, k)] = true;
                    }
                    // face normal to i at (i+a, j, k); normal to j at (i, j+a, k); normal to k at (i, j, k+a)
                    faces[0][vid(i + a, j, k)] = true;
                    faces[1][vid(i, j + a, k)] = true;
                    faces[2][vid(i, j, k + a)] = true;
                }
            }
        }
    }
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as i64;
    Counts3D {
        vertices: count(&vertices),
        edges: edges.iter().map(|e| count(e)).sum(),
        faces: faces.iter().map(|f| count(f)).sum(),
        cells,
    }
}

/// `V - E + F - C` of the induced complex (26-connected foreground).
pub fn euler_bruteforce_3d(x: &BinaryComplex3D) -> i64 {
    let c = simplex_counts_3d(x);
    c.vertices - c.edges + c.faces - c.cells
}

pub fn volume_oracle_3d(x: &BinaryComplex3D) -> i64 {
    x.active.iter().filter(|&&b| b).count() as i64
}

/// Grid faces incident to exactly one active cell.
pub fn surface_area_oracle_3d(x: &BinaryComplex3D) -> i64 {
    let (w, h, d) = (x.width as isize, x.height as isize, x.depth as isize);
    let mut n = 0;
    for i in 0..=h {
        for j in 0..=w {
            for k in 0..=d {
                let here = x.cell(i, j, k);
                n += i64::from(x.cell(i - 1, j, k) != here);
                n += i64::from(x.cell(i, j - 1, k) != here);
                n += i64::from(x.cell(i, j, k - 1) != here);
            }
        }
    }
    n
}

/// Total length of sharp edges: each grid edge adds 1 when one or three of
/// its four cells are active, 2 when exactly two diagonal cells are active.
pub fn sharp_edge_perimeter_oracle_3d(x: &BinaryComplex3D) -> i64 {
    let (w, h, d) = (x.width as isize, x.height as isize, x.depth as isize);
    // ring of four cells around an edge, listed so that opposite entries are diagonal
    let score = |ring: [bool; 4]| -> i64 {
        let n = ring.iter().filter(|&&b| b).count();
        match n {
            1 | 3 => 1,
            2 if ring[0] == ring[2] => 2,
            _ => 0,
        }
    };
    let mut total = 0;
    // edges along i: from (i, j, k) to (i + 1, j, k)
    for i in 0..h {
        for j in 0..=w {
            for k in 0..=d {
                total += score([
                    x.cell(i, j - 1, k - 1),
                    x.cell(i, j, k - 1),
                    x.cell(i, j, k),
                    x.cell(i, j - 1, k),
                ]);
            }
        }
    }
    // edges along j
    for i in 0..=h {
        for j in 0..w {
            for k in 0..=d {
                total += score([
                    x.cell(i - 1, j, k - 1),
                    x.cell(i, j, k - 1),
                    x.cell(i, j, k),
                    x.cell(i - 1, j, k),
                ]);
            }
        }
    }
    // edges along k
    for i in 0..=h {
        for j in 0..=w {
            for k in 0..d {
                total += score([
                    x.cell(i - 1, j - 1, k),
                    x.cell(i, j - 1, k),
                    x.cell(i, j, k),
                    x.cell(i - 1, j, k),
                ]);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle2D {
    Ec8,
    Ec4,
    Perimeter,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle3D {
    Ec26,
    Volume,
    SurfaceArea,
    SharpEdgePerimeter,
}

/// Descriptor value at every level `0..=M`, recomputed from scratch per level.
pub fn curve_bruteforce_2d(field: &Field2D, which: Oracle2D) -> Vec<i64> {
    (0..=field.max_level())
        .map(|c| {
            let x = binarize_2d(field, c);
            match which {
                Oracle2D::Ec8 => euler_bruteforce_2d(&x),
                Oracle2D::Ec4 => euler_4c_bruteforce_2d(&x),
                Oracle2D::Perimeter => perimeter_oracle_2d(&x),
                Oracle2D::Area => area_oracle_2d(&x),
            }
        })
        .collect()
}

pub fn curve_bruteforce_3d(field: &Field3D, which: Oracle3D) -> Vec<i64> {
    (0..=field.max_level())
        .map(|c| {
            let x = binarize_3d(field, c);
            match which {
                Oracle3D::Ec26 => euler_bruteforce_3d(&x),
                Oracle3D::Volume => volume_oracle_3d(&x),
                Oracle3D::SurfaceArea => surface_area_oracle_3d(&x),
                Oracle3D::SharpEdgePerimeter => sharp_edge_perimeter_oracle_3d(&x),
            }
        })
        .collect()
}
